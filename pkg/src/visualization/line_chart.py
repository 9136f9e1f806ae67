from typing import Dict, List, Optional

import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from .chart_base import ChartBase

LOSS_COLUMNS = ["L_seg", "L_con", "L_align", "L_total"]
LAMBDA_COLUMNS = ["lambda_1", "lambda_2", "lambda_3", "lambda_4"]


class LossCurveChart(ChartBase):
    """Curvas de pérdidas (o de pesos de fusión) frente a la iteración"""

    required_columns = ("iter", "L_total")

    def create_chart(self, df: pd.DataFrame, **kwargs) -> go.Figure:
        """
        Crea las curvas a partir del CSV de métricas.

        Args:
            df: DataFrame de métricas
            **kwargs: Argumentos para la configuración del gráfico
                - columns: Columnas a dibujar (por defecto las pérdidas)
                - smoothing: Ventana de media móvil (opcional)
                - title: Título del gráfico (opcional)
                - log_y: Eje Y logarítmico (opcional)

        Returns:
            Figura de Plotly
        """
        self._check(df)
        columns: List[str] = [c for c in kwargs.get('columns', LOSS_COLUMNS) if c in df.columns]
        smoothing: Optional[int] = kwargs.get('smoothing')

        plot_df = df[["iter"] + columns].copy()
        if smoothing and smoothing > 1:
            plot_df[columns] = plot_df[columns].rolling(smoothing, min_periods=1).mean()
        long_df = plot_df.melt(id_vars="iter", value_vars=columns, var_name="serie", value_name="valor")

        fig = px.line(long_df, x="iter", y="valor", color="serie",
                      title=kwargs.get('title', 'Curvas de entrenamiento'), log_y=kwargs.get('log_y', False))
        fig.update_layout(xaxis_title="iteración", yaxis_title="valor", height=500)
        return fig

    def get_optional_parameters(self) -> Dict[str, str]:
        return {
            'columns': 'Columnas a dibujar',
            'smoothing': 'Ventana de media móvil',
            'title': 'Título del gráfico',
            'log_y': 'Eje Y logarítmico',
        }


class SpectrumChart(ChartBase):
    """Perfil de magnitud por bin de frecuencia; admite varios perfiles con una columna 'variant'"""

    required_columns = ("frequency_bin", "magnitude")

    def create_chart(self, df: pd.DataFrame, **kwargs) -> go.Figure:
        self._check(df)
        color = 'variant' if 'variant' in df.columns else None
        fig = px.line(df, x="frequency_bin", y="magnitude", color=color,
                      title=kwargs.get('title', 'Espectro de las features'), log_y=kwargs.get('log_y', True))
        fig.update_layout(xaxis_title="bin de frecuencia", yaxis_title="magnitud media", height=450)
        return fig
