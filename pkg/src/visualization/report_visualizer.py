#Clase principal para la visualización de resultados
#Elige los gráficos compatibles según las columnas del DataFrame (métricas, EvalReport, espectro o nube)
#y exporta las figuras a HTML

import logging
from pathlib import Path
from typing import Any, Dict, List, MutableMapping, Optional, Union

import pandas as pd
import plotly.graph_objects as go

from .bar_chart import ClassHistogramChart, ClassIoUChart
from .chart_base import ChartBase
from .line_chart import LAMBDA_COLUMNS, LossCurveChart, SpectrumChart
from .scatter_chart import CloudScatterChart

logger = logging.getLogger(__name__)


class ReportVisualizer:
    """Clase principal para la visualización de resultados"""

    def __init__(self, store: Optional[MutableMapping[str, Any]] = None):
        """
        Inicializa el visualizador.

        Args:
            store: Almacén de estado (p.ej. st.session_state); un dict nuevo si no se indica
        """
        self.chart_types: Dict[str, ChartBase] = {
            'loss': LossCurveChart(),
            'spectrum': SpectrumChart(),
            'cloud': CloudScatterChart(),
            'iou': ClassIoUChart(),
            'histogram': ClassHistogramChart(),
        }
        self.store = store if store is not None else {}
        if 'current_chart' not in self.store:
            self.store['current_chart'] = None

    def get_compatible_charts(self, df: pd.DataFrame) -> Dict[str, ChartBase]:
        """
        Determina qué tipos de gráficos son compatibles con el DataFrame.

        Args:
            df: DataFrame a analizar

        Returns:
            Diccionario con los tipos de gráficos compatibles
        """
        if df is None or df.empty:
            return {}
        return {name: chart for name, chart in self.chart_types.items() if chart.is_compatible(df)}

    def create_chart(self, df: pd.DataFrame, chart_type: str, chart_params: Optional[Dict[str, Any]] = None) -> go.Figure:
        if chart_type not in self.chart_types:
            raise ValueError(f"Tipo de gráfico no soportado: {chart_type}")
        fig = self.chart_types[chart_type].create_chart(df, **(chart_params or {}))
        self.store['current_chart'] = fig
        return fig

    def suggest_charts(self, df: pd.DataFrame) -> List[Dict[str, Any]]:
        """
        Sugerencias automáticas de gráficos para el DataFrame.

        Returns:
            Lista de diccionarios con type, title y params
        """
        compatible = self.get_compatible_charts(df)
        suggestions = []
        if 'loss' in compatible:
            suggestions.append({'type': 'loss', 'title': 'Pérdidas por iteración', 'params': {}})
            if all(c in df.columns for c in LAMBDA_COLUMNS):
                suggestions.append({'type': 'loss', 'title': 'Pesos de fusión',
                                    'params': {'columns': LAMBDA_COLUMNS, 'title': 'Pesos de fusión'}})
        if 'iou' in compatible:
            suggestions.append({'type': 'iou', 'title': 'IoU por clase', 'params': {}})
        if 'spectrum' in compatible:
            suggestions.append({'type': 'spectrum', 'title': 'Espectro de frecuencias', 'params': {}})
        if 'cloud' in compatible:
            suggestions.append({'type': 'cloud', 'title': 'Nube coloreada por clase', 'params': {}})
        if 'histogram' in compatible:
            suggestions.append({'type': 'histogram', 'title': 'Puntos por clase', 'params': {}})
        return suggestions

    def export_html(self, fig: Optional[go.Figure], path: Union[str, Path]) -> Path:
        """Escribe la figura (o la última creada) como HTML autocontenido"""
        fig = fig if fig is not None else self.store['current_chart']
        if fig is None:
            raise ValueError("No hay ningún gráfico para exportar")
        path = Path(path)
        fig.write_html(str(path), include_plotlyjs="cdn")
        logger.info("Gráfico exportado a %s", path)
        return path
