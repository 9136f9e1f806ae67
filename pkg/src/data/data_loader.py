#clase abstracta
#Defino los metodos para cargar nubes de puntos e implementa validaciones

from abc import ABC, abstractmethod
from typing import BinaryIO, Dict

import pandas as pd

from .point_cloud import PointCloud


class CloudLoader(ABC):
    """Clase base abstracta para todos los cargadores de nubes"""

    @abstractmethod
    def load_cloud(self, file_obj: BinaryIO, **kwargs) -> PointCloud:
        """
        Carga una nube desde un archivo.

        Args:
            file_obj: Objeto de archivo a cargar
            **kwargs: Argumentos específicos para cada tipo de cargador

        Returns:
            PointCloud con los datos cargados
        """
        pass

    @abstractmethod
    def validate_file(self, file_obj: BinaryIO) -> bool:
        """
        Valida si el archivo es del formato correcto para este cargador.

        Args:
            file_obj: Objeto de archivo a validar

        Returns:
            True si el archivo es válido, False en caso contrario
        """
        pass

    def get_preview(self, cloud: PointCloud, rows: int = 5) -> pd.DataFrame:
        """
        Obtiene una vista previa tabular de la nube.

        Args:
            cloud: Nube cargada
            rows: Número de puntos a mostrar

        Returns:
            DataFrame con columnas x, y, z, r, g, b, label
        """
        frame = pd.DataFrame(cloud.features, columns=["x", "y", "z", "r", "g", "b"])
        frame["label"] = cloud.labels
        return frame.head(rows)


class CloudLoaderFactory:
    """Factory para crear el cargador apropiado según el tipo de archivo"""

    @staticmethod
    def get_loader(file_name: str) -> CloudLoader:
        """
        Retorna el cargador adecuado según la extensión del archivo

        Args:
            file_name: Nombre del archivo

        Returns:
            Instancia del cargador adecuado
        """
        from .csv_loader import CSVLoader
        from .epc_loader import EPCLoader

        if file_name.lower().endswith('.csv'):
            return CSVLoader()
        elif file_name.lower().endswith('.epc'):
            return EPCLoader()
        else:
            raise ValueError(f"Formato de archivo no soportado: {file_name}")
