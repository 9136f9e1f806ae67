import pandas as pd
import plotly.express as px
import plotly.graph_objects as go

from .chart_base import ChartBase


class ClassIoUChart(ChartBase):
    """IoU por clase de un EvalReport, con la m-IoU como línea horizontal"""

    required_columns = ("class", "iou")

    def create_chart(self, df: pd.DataFrame, **kwargs) -> go.Figure:
        self._check(df)
        plot_df = df.dropna(subset=["iou"])
        fig = px.bar(plot_df, x="class", y="iou", title=kwargs.get('title', 'IoU por clase'),
                     range_y=[0, 1], text_auto=".3f")
        if not plot_df.empty:
            fig.add_hline(y=float(plot_df["iou"].mean()), line_dash="dash", annotation_text="m-IoU")
        fig.update_layout(xaxis_title="clase", yaxis_title="IoU", height=450)
        return fig


class ClassHistogramChart(ChartBase):
    """Número de puntos por clase de una nube"""

    required_columns = ("class_name", "points")

    def create_chart(self, df: pd.DataFrame, **kwargs) -> go.Figure:
        self._check(df)
        orientation = kwargs.get('orientation', 'v')
        if orientation == 'h':
            fig = px.bar(df, y="class_name", x="points", orientation='h',
                         title=kwargs.get('title', 'Puntos por clase'))
        else:
            fig = px.bar(df, x="class_name", y="points", title=kwargs.get('title', 'Puntos por clase'))
        fig.update_layout(height=400)
        return fig
