import numpy as np
import pandas as pd
import plotly.graph_objects as go
import pytest

from src.exploration.cloud_explorer import cloud_to_frame
from src.visualization.report_visualizer import ReportVisualizer


@pytest.fixture
def metrics_frame():
    n = 5
    return pd.DataFrame({"iter": range(n), "L_seg": np.linspace(1, 0.5, n), "L_con": 0.1, "L_align": 0.2,
                         "L_total": np.linspace(1.1, 0.6, n), "lambda_1": 0.1, "lambda_2": 0.1,
                         "lambda_3": 0.1, "lambda_4": 0.5})


def test_metrics_frame_suggests_loss_and_fusion_curves(metrics_frame):
    visualizer = ReportVisualizer()
    assert set(visualizer.get_compatible_charts(metrics_frame)) == {"loss"}
    suggestions = visualizer.suggest_charts(metrics_frame)
    assert [s["title"] for s in suggestions] == ["Pérdidas por iteración", "Pesos de fusión"]
    fig = visualizer.create_chart(metrics_frame, "loss", {"smoothing": 2})
    assert isinstance(fig, go.Figure)
    assert len(fig.data) == 4


def test_iou_and_spectrum_charts():
    visualizer = ReportVisualizer()
    report = pd.DataFrame({"class": ["background", "a"], "tp": [3, 1], "fp": [1, 0], "fn": [0, 1],
                           "iou": [0.75, 0.5]})
    assert "iou" in visualizer.get_compatible_charts(report)
    assert isinstance(visualizer.create_chart(report, "iou"), go.Figure)

    spectrum = pd.DataFrame({"frequency_bin": [0, 1, 2], "magnitude": [3.0, 1.0, 0.5]})
    assert set(visualizer.get_compatible_charts(spectrum)) == {"spectrum"}


def test_cloud_chart_subsamples(line_cloud):
    visualizer = ReportVisualizer()
    frame = cloud_to_frame(line_cloud)
    fig = visualizer.create_chart(frame, "cloud", {"color": None, "max_points": 5})
    assert len(fig.data[0].x) == 5


def test_unknown_chart_and_missing_columns(metrics_frame):
    visualizer = ReportVisualizer()
    with pytest.raises(ValueError):
        visualizer.create_chart(metrics_frame, "pie")
    with pytest.raises(ValueError):
        visualizer.create_chart(metrics_frame, "iou")
    assert visualizer.get_compatible_charts(pd.DataFrame()) == {}


def test_export_html_uses_last_chart(tmp_path, metrics_frame):
    store = {}
    visualizer = ReportVisualizer(store)
    with pytest.raises(ValueError):
        visualizer.export_html(None, tmp_path / "none.html")
    visualizer.create_chart(metrics_frame, "loss")
    assert store["current_chart"] is not None
    path = visualizer.export_html(None, tmp_path / "loss.html")
    assert path.exists()
