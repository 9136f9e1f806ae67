#Especializada en cargar nubes en CSV
#Columnas x,y,z,r,g,b,label y opcionalmente class_name

import io
from typing import BinaryIO, Dict

import pandas as pd

from .data_loader import CloudLoader
from .point_cloud import PointCloud

REQUIRED_COLUMNS = ["x", "y", "z", "r", "g", "b", "label"]


class CSVLoader(CloudLoader):
    """Cargador específico para nubes en csv"""

    def validate_file(self, file_obj: BinaryIO) -> bool:
        """
        Valida si el archivo es un CSV de nube válido.

        Args:
            file_obj: Objeto de archivo a validar

        Returns:
            True si la cabecera contiene las columnas requeridas
        """
        try:
            #Guardamos la posición actual en el archivo
            pos = file_obj.tell()
            header = file_obj.readline().decode('utf-8')
            file_obj.seek(pos)

            delimiter = ';' if ';' in header else ','
            columns = [c.strip() for c in header.split(delimiter)]
            return all(c in columns for c in REQUIRED_COLUMNS)
        except Exception:
            return False

    def load_cloud(self, file_obj: BinaryIO, **kwargs) -> PointCloud:
        """
        Carga una nube desde un archivo CSV.

        Args:
            file_obj: Objeto de archivo CSV
            **kwargs: Argumentos para pd.read_csv
                - delimiter: Delimitador a usar (por defecto ',')
                - encoding: Codificación del archivo (por defecto 'utf-8')

        Returns:
            PointCloud con los datos del CSV
        """
        delimiter = kwargs.get('delimiter', ',')
        encoding = kwargs.get('encoding', 'utf-8')

        try:
            #creamos una copia en memoria para evitar problemas de buffering
            file_content = io.BytesIO(file_obj.read())
            df = pd.read_csv(file_content, delimiter=delimiter, encoding=encoding)
        except Exception as e:
            raise ValueError(f"Error al cargar el archivo CSV: {str(e)}")

        missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
        if missing:
            raise ValueError(f"Faltan columnas en el CSV: {missing}")

        labels = df["label"].astype(int)
        class_names: Dict[int, str] = {}
        if "class_name" in df.columns:
            named = df.loc[labels >= 0, ["label", "class_name"]].drop_duplicates("label")
            class_names = {int(l): str(n) for l, n in zip(named["label"], named["class_name"])}
        else:
            class_names = {int(l): f"class_{int(l)}" for l in labels.unique() if l >= 0}

        return PointCloud(
            xyz=df[["x", "y", "z"]].to_numpy(dtype=float),
            rgb=df[["r", "g", "b"]].to_numpy(dtype=float),
            labels=labels.to_numpy(),
            class_names=class_names,
        )


def write_csv(cloud: PointCloud, path) -> None:
    """Escribe la nube en CSV con la columna class_name"""
    frame = pd.DataFrame(cloud.features, columns=["x", "y", "z", "r", "g", "b"])
    frame["label"] = cloud.labels
    frame["class_name"] = [cloud.class_names.get(int(l), "") for l in cloud.labels]
    frame.to_csv(path, index=False)
