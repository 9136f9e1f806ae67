#Entrenamiento completo a escala de escritorio; se ejecuta con `pytest -m slow`

import statistics

import pytest

from src.config import TrainConfig
from src.data.data_manager import CorpusManager
from src.data.scene_generator import generate_dataset, planted_text_embeddings
from src.model.text_embeddings import TextEmbeddingTable
from src.training.checkpoint import build_model
from src.training.evaluator import evaluate, fixed_episodes
from src.training.trainer import train
from src.training.zero_shot import zero_shot_infer

pytestmark = pytest.mark.slow

SEEDS = (0, 1, 2)
N_WAY = 2
CHANCE = 1.0 / (N_WAY + 1)
VARIANTS = ("full", "proera", "lgpe", "drpe")


def desk_config(seed: int, disabled: str = "full") -> TrainConfig:
    config = TrainConfig(iterations=2000, n_points=512, seed=seed, n_way=N_WAY, k_shot=1)
    if disabled != "full":
        config.ablation.disable(disabled)
    return config.validate()


@pytest.fixture(scope="module")
def desk_task():
    clouds, signatures = generate_dataset(16, 8, seed=0)
    manager = CorpusManager()
    for name, cloud in clouds.items():
        manager.add_cloud(name, cloud)
    corpus = manager.build_corpus(block_size=1.0, n_points=512, seed=0, min_fold_classes=2 * N_WAY)
    text_dim = TrainConfig().model.text_dim
    table = TextEmbeddingTable(dim=text_dim, synthetic_fallback=False, seed=0)
    for name, vector in planted_text_embeddings(signatures, text_dim, seed=0).items():
        table.add(name, vector)
    return corpus, table


@pytest.fixture(scope="module")
def trained(desk_task):
    corpus, table = desk_task
    models = {}
    for variant in VARIANTS:
        for seed in SEEDS:
            models[variant, seed], _ = train(desk_config(seed, variant), corpus, table, progress=False)
    return models


def median_miou(models, variant, desk_task, zero_shot=False):
    corpus, table = desk_task
    scores = [evaluate(models[variant, seed], corpus, n_episodes=100, n_way=N_WAY, table=table, seed=seed,
                       zero_shot=zero_shot).miou for seed in SEEDS]
    return statistics.median(scores)


def test_training_beats_untrained_and_chance(trained, desk_task):
    corpus, table = desk_task
    untrained = statistics.median(
        evaluate(build_model(desk_config(seed)), corpus, n_episodes=100, n_way=N_WAY, table=table, seed=seed).miou
        for seed in SEEDS)
    full = median_miou(trained, "full", desk_task)
    assert full >= CHANCE + 0.15
    assert full > untrained


@pytest.mark.parametrize("variant", ["proera", "lgpe", "drpe"])
def test_single_ablation_does_not_improve(trained, desk_task, variant):
    assert median_miou(trained, variant, desk_task) <= median_miou(trained, "full", desk_task) + 0.01


def test_zero_shot_with_planted_table(trained, desk_task):
    corpus, _ = desk_task
    assert median_miou(trained, "full", desk_task, zero_shot=True) >= CHANCE + 0.10
    episode = fixed_episodes(corpus, 1, N_WAY, 1, seed=0)[0]
    result = zero_shot_infer(trained["full", 0], episode.query, episode.class_names, desk_task[1])
    assert episode.support_reads == 0 and episode.label_reads == 0
    assert result.probs.shape == (len(episode.query), N_WAY + 1)
