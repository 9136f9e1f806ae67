import numpy as np
import pandas as pd
import pytest

from src.data.point_cloud import PointCloud
from src.exploration.cloud_explorer import CloudExplorer, cloud_to_frame
from src.exploration.param_report import param_count_report
from src.exploration.spectrum import (export_features, high_band_fraction, morton_order, spectrum_export,
                                      spectrum_profile)
from src.training.checkpoint import build_model
from src.training.evaluator import fixed_episodes

from tests.conftest import tiny_config


def test_morton_order_follows_single_varying_axis():
    xyz = np.array([[3.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]])
    assert morton_order(xyz).tolist() == [1, 2, 0]


def test_morton_order_is_a_permutation():
    xyz = np.random.default_rng(0).uniform(size=(50, 3))
    assert sorted(morton_order(xyz).tolist()) == list(range(50))


def test_constant_features_have_no_high_band(line_cloud):
    profile = spectrum_profile(np.ones((8, 4)), line_cloud.xyz)
    assert len(profile) == 5
    assert profile["magnitude"].iloc[0] == pytest.approx(8.0)
    assert high_band_fraction(profile) == 0.0


def test_alternating_features_are_all_high_band(line_cloud):
    features = np.tile(np.array([[1.0], [-1.0]]), (4, 3))
    profile = spectrum_profile(features, line_cloud.xyz)
    assert high_band_fraction(profile) == pytest.approx(1.0)


def test_spectrum_and_feature_export(tmp_path, line_cloud):
    features = np.random.default_rng(1).normal(size=(8, 2))
    profile = spectrum_export(features, line_cloud, tmp_path / "spectrum.csv")
    written = pd.read_csv(tmp_path / "spectrum.csv")
    np.testing.assert_allclose(written["magnitude"], profile["magnitude"])

    df = export_features(features, line_cloud, tmp_path / "features.csv")
    assert list(df.columns) == ["x", "y", "z", "label", "f0", "f1"]
    assert len(pd.read_csv(tmp_path / "features.csv")) == 8


def test_param_count_report(tmp_path, model):
    report = param_count_report(model, tmp_path / "params.csv")
    assert report["module"].tolist() == ["backbone", "lgpe", "decoder", "align"] + ["total"]
    assert report["parameters"].iloc[-1] == model.num_parameters()
    assert report["parameters"].iloc[:-1].sum() == model.num_parameters()
    assert (tmp_path / "params.csv").exists()


def test_cloud_explorer_filters(line_cloud):
    explorer = CloudExplorer(line_cloud)
    histogram = explorer.class_histogram()
    assert histogram["points"].tolist() == [4, 4]
    assert histogram["class_name"].tolist() == ["floor", "chair"]

    explorer.filter_by_classes([1])
    assert set(explorer.get_filtered_data()["label"]) == {1}
    explorer.filter_by_range("x", (5.0, 6.0))
    assert explorer.get_filtered_data()["x"].tolist() == [5.0, 6.0]

    explorer.reset_filters()
    assert len(explorer.get_filtered_data()) == 8
    stats = explorer.get_class_stats(1)
    assert stats["count"] == 4
    assert stats["centroid"]["x"] == pytest.approx(5.5)
    assert explorer.get_class_stats(9) == {}


def test_cloud_to_frame_marks_unlabeled_points():
    cloud = PointCloud(np.zeros((2, 3)), np.zeros((2, 3)), np.array([0, -1]), {0: "floor"})
    assert cloud_to_frame(cloud)["class_name"].tolist() == ["floor", "unlabeled"]


def test_low_pass_decoder_has_less_high_band_energy(corpus, table):
    episode = fixed_episodes(corpus, 1, 2, 1, seed=0)[0]
    full = build_model(tiny_config())
    low_pass_config = tiny_config()
    low_pass_config.ablation.proera_low_pass = True
    low_pass = build_model(low_pass_config)

    full_fraction = high_band_fraction(spectrum_export(full.forward(episode, table).decoded.query, episode.query))
    low_fraction = high_band_fraction(spectrum_export(low_pass.forward(episode, table).decoded.query, episode.query))
    assert low_fraction < 1e-6
    assert full_fraction > low_fraction
