from abc import ABC, abstractmethod
from typing import Dict, Sequence

import pandas as pd
import plotly.graph_objects as go


class ChartBase(ABC):
    """Clase base abstracta para todos los tipos de gráficos"""

    #Columnas que debe tener el DataFrame para que el gráfico tenga sentido
    required_columns: Sequence[str] = ()

    @abstractmethod
    def create_chart(self, df: pd.DataFrame, **kwargs) -> go.Figure:
        """
        Crea un gráfico a partir de los datos.

        Args:
            df: DataFrame con los datos
            **kwargs: Argumentos específicos para cada tipo de gráfico

        Returns:
            Figura de Plotly
        """

    def get_optional_parameters(self) -> Dict[str, str]:
        """
        Retorna los parámetros opcionales para este tipo de gráfico.

        Returns:
            Diccionario con nombres de parámetros y descripciones
        """
        return {'title': 'Título del gráfico'}

    def is_compatible(self, df: pd.DataFrame) -> bool:
        """
        Determina si el gráfico puede construirse con las columnas del DataFrame.

        Args:
            df: DataFrame a analizar

        Returns:
            True si están todas las columnas requeridas y hay filas
        """
        return df is not None and not df.empty and all(c in df.columns for c in self.required_columns)

    def _check(self, df: pd.DataFrame) -> None:
        missing = [c for c in self.required_columns if c not in df.columns]
        if missing:
            raise ValueError(f"{type(self).__name__}: faltan las columnas {missing}")
