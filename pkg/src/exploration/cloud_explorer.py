#Exploración básica de una nube de puntos cargada
#Funcionalidades principales:

#Tabla de puntos con nombre de clase
#Histograma de clases
#Estadísticas por clase
#Filtrado por clases y por rango de coordenadas

from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from src.data.point_cloud import PointCloud

COLUMNS = ["x", "y", "z", "r", "g", "b", "label", "class_name"]


def cloud_to_frame(cloud: PointCloud) -> pd.DataFrame:
    df = pd.DataFrame(cloud.features, columns=COLUMNS[:6])
    df["label"] = cloud.labels
    df["class_name"] = [cloud.class_names.get(int(l), "unlabeled") for l in cloud.labels]
    return df


class CloudExplorer:
    """Clase para explorar y filtrar los puntos de una nube"""

    def __init__(self, cloud: Optional[PointCloud] = None):
        self.original_df: Optional[pd.DataFrame] = None
        self.filtered_df: Optional[pd.DataFrame] = None
        if cloud is not None:
            self.set_cloud(cloud)

    def set_cloud(self, cloud: PointCloud) -> None:
        """
        Establece la nube a explorar

        Args:
            cloud: Nube de puntos
        """
        self.original_df = cloud_to_frame(cloud)
        self.filtered_df = self.original_df.copy()

    def class_histogram(self) -> pd.DataFrame:
        """
        Número de puntos por clase en la vista filtrada

        Returns:
            DataFrame con columnas label, class_name, points
        """
        if self.filtered_df is None:
            return pd.DataFrame(columns=["label", "class_name", "points"])
        counts = self.filtered_df.groupby(["label", "class_name"]).size().reset_index(name="points")
        return counts.sort_values("label").reset_index(drop=True)

    def get_class_stats(self, label: int) -> Dict[str, Any]:
        """
        Estadísticas de los puntos de una clase

        Args:
            label: Identificador de clase

        Returns:
            Diccionario con recuento, centroide, extensión y color medio
        """
        if self.original_df is None:
            return {}
        rows = self.original_df[self.original_df["label"] == label]
        if rows.empty:
            return {}
        xyz = rows[["x", "y", "z"]]
        return {
            'label': label,
            'class_name': rows["class_name"].iloc[0],
            'count': len(rows),
            'centroid': xyz.mean().to_dict(),
            'extent': (xyz.max() - xyz.min()).to_dict(),
            'mean_color': rows[["r", "g", "b"]].mean().to_dict(),
        }

    def filter_by_classes(self, labels: List[int]) -> None:
        """Mantiene sólo los puntos de las clases indicadas; una lista vacía no filtra"""
        if self.original_df is None:
            return
        df = self.original_df.copy()
        if labels:
            df = df[df["label"].isin(labels)]
        self.filtered_df = df

    def filter_by_range(self, column: str, bounds: Tuple[float, float]) -> None:
        """Filtra la vista actual por un rango cerrado de una coordenada o canal de color"""
        if self.filtered_df is None or column not in COLUMNS[:6]:
            return
        low, high = bounds
        self.filtered_df = self.filtered_df[(self.filtered_df[column] >= low) & (self.filtered_df[column] <= high)]

    def get_filtered_data(self) -> Optional[pd.DataFrame]:
        return self.filtered_df

    def get_summary_stats(self) -> Optional[pd.DataFrame]:
        """
        Resumen estadístico de las columnas numéricas de la vista filtrada

        Returns:
            DataFrame de describe() transpuesto
        """
        if self.filtered_df is None:
            return None
        return self.filtered_df[COLUMNS[:6]].describe().T

    def reset_filters(self) -> None:
        if self.original_df is not None:
            self.filtered_df = self.original_df.copy()
