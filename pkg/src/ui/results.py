import json

import pandas as pd
import streamlit as st

from src.visualization.report_visualizer import ReportVisualizer


def _read_eval_report(uploaded_file):
    """Separa las filas por clase de la línea de resumen de un EvalReport JSON-lines"""
    rows, summary = [], {}
    for line in uploaded_file.getvalue().decode("utf-8").splitlines():
        if not line.strip():
            continue
        record = json.loads(line)
        if "summary" in record:
            summary = record["summary"]
        else:
            rows.append(record)
    return pd.DataFrame(rows), summary


def render_results_ui():
    """Renderiza la interfaz para revisar métricas, informes de evaluación y espectros"""

    st.header("📊 Resultados")

    visualizer = ReportVisualizer(st.session_state)
    tab1, tab2, tab3 = st.tabs(["📈 Métricas de entrenamiento", "🎯 Evaluación", "🌊 Espectro"])

    with tab1:
        metrics_file = st.file_uploader("CSV de métricas (metrics.csv)", type=["csv"], key="metrics_upload")
        if metrics_file is not None:
            df = pd.read_csv(metrics_file)
            smoothing = st.slider("Media móvil", min_value=1, max_value=200, value=20)
            for suggestion in visualizer.suggest_charts(df):
                params = dict(suggestion['params'], smoothing=smoothing)
                st.plotly_chart(visualizer.create_chart(df, suggestion['type'], params), use_container_width=True)
            st.dataframe(df.tail(10))

    with tab2:
        report_file = st.file_uploader("Informe de evaluación (JSON-lines)", type=["jsonl", "json"],
                                       key="report_upload")
        if report_file is not None:
            try:
                df, summary = _read_eval_report(report_file)
            except (ValueError, KeyError) as e:
                st.error(f"No se pudo leer el informe: {str(e)}")
            else:
                if summary:
                    st.info(f"m-IoU: {summary.get('miou', float('nan')):.4f} | "
                            f"Episodios: {summary.get('episodes')} | Tiempo: {summary.get('wall_time', 0):.1f} s")
                if visualizer.get_compatible_charts(df).get('iou'):
                    st.plotly_chart(visualizer.create_chart(df, 'iou'), use_container_width=True)
                st.dataframe(df)

    with tab3:
        spectrum_files = st.file_uploader("Perfiles de espectro (CSV)", type=["csv"], accept_multiple_files=True,
                                          key="spectrum_upload")
        if spectrum_files:
            frames = []
            for f in spectrum_files:
                frame = pd.read_csv(f)
                frame["variant"] = f.name
                frames.append(frame)
            df = pd.concat(frames, ignore_index=True)
            if 'spectrum' in visualizer.get_compatible_charts(df):
                st.plotly_chart(visualizer.create_chart(df, 'spectrum'), use_container_width=True)
            else:
                st.warning("Los ficheros no tienen las columnas frequency_bin y magnitude")
