import numpy as np
import pytest

from src.config import ModelConfig, TrainConfig
from src.data.data_manager import CorpusManager
from src.data.point_cloud import PointCloud
from src.data.scene_generator import generate_dataset
from src.model.text_embeddings import TextEmbeddingTable
from src.training.checkpoint import build_model

TEXT_DIM = 6


def tiny_config(**overrides) -> TrainConfig:
    """Configuración reducida para que un episodio se ejecute en milisegundos"""
    model = ModelConfig(feature_dim=8, backbone_widths=(8, 8), backbone_k=4, decoder_blocks=2,
                        n_prototypes=3, n_registers=2, text_dim=TEXT_DIM)
    config = TrainConfig(iterations=2, n_points=64, eval_episodes=2, model=model)
    for key, value in overrides.items():
        setattr(config, key, value)
    return config.validate()


@pytest.fixture
def small_config() -> TrainConfig:
    return tiny_config()


@pytest.fixture(scope="session")
def scenes():
    clouds, signatures = generate_dataset(6, n_classes=4, seed=0)
    return clouds, signatures


@pytest.fixture(scope="session")
def corpus(scenes):
    clouds, _ = scenes
    manager = CorpusManager()
    for name, cloud in clouds.items():
        manager.add_cloud(name, cloud)
    return manager.build_corpus(block_size=1.0, n_points=64, seed=0)


@pytest.fixture
def table() -> TextEmbeddingTable:
    return TextEmbeddingTable(dim=TEXT_DIM, synthetic_fallback=True, seed=0)


@pytest.fixture
def model(small_config):
    return build_model(small_config)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def line_cloud() -> PointCloud:
    """Ocho puntos sobre el eje x con dos clases"""
    xyz = np.column_stack([np.arange(8.0), np.zeros(8), np.zeros(8)])
    rgb = np.full((8, 3), 0.5)
    labels = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    return PointCloud(xyz, rgb, labels, {0: "floor", 1: "chair"})
