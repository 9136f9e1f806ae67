from typing import Dict

import numpy as np
import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from .chart_base import ChartBase


class CloudScatterChart(ChartBase):
    """Nube de puntos en 3D coloreada por clase (o por cualquier columna)"""

    required_columns = ("x", "y", "z")

    def create_chart(self, df: pd.DataFrame, **kwargs) -> go.Figure:
        """
        Crea un gráfico de dispersión 3D.

        Args:
            df: DataFrame con columnas x, y, z
            **kwargs: Argumentos para la configuración del gráfico
                - color: Columna para el color (por defecto class_name si existe)
                - max_points: Submuestreo determinista para nubes grandes
                - point_size: Tamaño de los marcadores
                - title: Título del gráfico (opcional)

        Returns:
            Figura de Plotly
        """
        self._check(df)
        color = kwargs.get('color', 'class_name' if 'class_name' in df.columns else None)
        max_points = kwargs.get('max_points', 20000)

        plot_df = df
        if max_points and len(df) > max_points:
            index = np.random.default_rng(0).choice(len(df), size=max_points, replace=False)
            plot_df = df.iloc[np.sort(index)]

        fig = px.scatter_3d(plot_df, x="x", y="y", z="z", color=color,
                            title=kwargs.get('title', 'Nube de puntos'))
        fig.update_traces(marker={'size': kwargs.get('point_size', 2)})
        fig.update_layout(height=650, scene={'aspectmode': 'data'})
        return fig

    def get_optional_parameters(self) -> Dict[str, str]:
        return {
            'color': 'Columna para asignar colores a los puntos',
            'max_points': 'Número máximo de puntos dibujados',
            'point_size': 'Tamaño de los puntos',
            'title': 'Título del gráfico',
        }
