#Evaluación por m-IoU sobre episodios de test
#La confusión se acumula por nombre de clase real: "background" más las clases de test

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.data.augment import jitter_scale_augment
from src.data.episode_sampler import BlockCorpus, sample_episode
from src.data.point_cloud import Episode
from src.model.network import EPSegModel
from src.model.text_embeddings import TextEmbeddingTable

logger = logging.getLogger(__name__)

BACKGROUND = "background"


class ConfusionCounter:
    """Matriz de confusión acumulada (filas = verdad, columnas = predicción)"""

    def __init__(self, n_class: int):
        self.n_class = n_class
        self.matrix = np.zeros((n_class, n_class), dtype=np.int64)

    def add_batch(self, preds: np.ndarray, labels: np.ndarray) -> None:
        preds = np.asarray(preds, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if preds.shape != labels.shape:
            raise ValueError(f"Predicciones {preds.shape} y etiquetas {labels.shape} no coinciden")
        valid = (labels >= 0) & (labels < self.n_class)
        index = self.n_class * labels[valid] + preds[valid]
        self.matrix += np.bincount(index, minlength=self.n_class ** 2).reshape(self.n_class, self.n_class)

    def merge(self, other: "ConfusionCounter") -> None:
        self.matrix += other.matrix

    @property
    def tp(self) -> np.ndarray:
        return np.diag(self.matrix)

    @property
    def fp(self) -> np.ndarray:
        return self.matrix.sum(axis=0) - self.tp

    @property
    def fn(self) -> np.ndarray:
        return self.matrix.sum(axis=1) - self.tp

    def iou(self) -> np.ndarray:
        """IoU por clase; NaN si la clase no aparece ni en la verdad ni en la predicción"""
        union = self.tp + self.fp + self.fn
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(union > 0, self.tp / np.maximum(union, 1), np.nan)


@dataclass
class EvalReport:
    class_names: List[str]
    tp: List[int]
    fp: List[int]
    fn: List[int]
    iou: Dict[str, float]
    miou: float
    episodes: int
    wall_time: float
    excluded: List[str] = field(default_factory=list)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"class": self.class_names, "tp": self.tp, "fp": self.fp, "fn": self.fn,
                             "iou": [self.iou.get(n, np.nan) for n in self.class_names]})

    def summary(self) -> Dict[str, object]:
        return {"miou": self.miou, "episodes": self.episodes, "wall_time": self.wall_time,
                "excluded": self.excluded}

    def write_jsonl(self, path: Union[str, Path]) -> None:
        """Una línea JSON por clase y una línea final con el resumen"""
        lines = self.to_frame().to_json(orient="records", lines=True).strip()
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(lines + "\n")
            fh.write(json.dumps({"summary": self.summary()}) + "\n")


def report_from_confusion(counter: ConfusionCounter, class_names: Sequence[str], seen: Sequence[bool],
                          episodes: int, wall_time: float) -> EvalReport:
    """
    Construye el informe. Las clases que no aparecen en ningún episodio (o con
    unión vacía) se excluyen de la media.
    """
    iou = counter.iou()
    included = np.asarray(seen, dtype=bool) & ~np.isnan(iou)
    excluded = [n for n, ok in zip(class_names, included) if not ok]
    if excluded:
        logger.info("Clases excluidas de la m-IoU: %s", excluded)
    miou = float(iou[included].mean()) if included.any() else float("nan")
    return EvalReport(class_names=list(class_names), tp=counter.tp.tolist(), fp=counter.fp.tolist(),
                      fn=counter.fn.tolist(),
                      iou={n: float(v) for n, v, ok in zip(class_names, iou, included) if ok},
                      miou=miou, episodes=episodes, wall_time=wall_time, excluded=excluded)


def fixed_episodes(corpus: BlockCorpus, n_episodes: int, n_way: int, k_shot: int, seed: int = 0) -> List[Episode]:
    """Episodios de test fijos para una semilla"""
    rng = np.random.default_rng(seed)
    return [sample_episode(corpus, n_way, k_shot, rng, split="test") for _ in range(n_episodes)]


def evaluate(model: EPSegModel, corpus: BlockCorpus, n_episodes: int = 100, n_way: int = 2, k_shot: int = 1,
             table: Optional[TextEmbeddingTable] = None, seed: int = 0, jitter_sigma: float = 0.0,
             scale: float = 1.0, workers: int = 1, zero_shot: bool = False) -> EvalReport:
    """
    Evalúa un modelo sobre episodios de la partición de test.

    Args:
        model: Modelo entrenado
        corpus: Corpus con la partición de test
        n_episodes: Número de episodios
        n_way: Clases por episodio
        k_shot: Ejemplos de soporte por clase
        table: Tabla de embeddings de texto
        seed: Semilla de los episodios y del ruido
        jitter_sigma: Ruido gaussiano aplicado a cada query
        scale: Escala aplicada a cada query
        workers: Hilos para evaluar episodios en paralelo
        zero_shot: Usar sólo prototipos de texto (sin leer el soporte)

    Returns:
        EvalReport
    """
    start = time.perf_counter()
    names = [BACKGROUND] + [corpus.class_names[c] for c in corpus.test_classes]
    global_index = {c: i + 1 for i, c in enumerate(corpus.test_classes)}
    episodes = fixed_episodes(corpus, n_episodes, n_way, k_shot, seed)
    noise_rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(max(n_episodes, 1))]
    if table is not None:
        # Los vectores sintéticos se crean antes de repartir episodios entre hilos
        table.matrix(names[1:])

    def run(i: int) -> ConfusionCounter:
        episode = episodes[i]
        if jitter_sigma > 0 or scale != 1.0:
            episode = replace(episode, query=jitter_scale_augment(episode.query, jitter_sigma, scale, noise_rngs[i]))
        if zero_shot:
            out = model.forward_zero_shot(episode.query, episode.class_names, table)
        else:
            out = model.forward(episode, table)
        lookup = np.array([0] + [global_index[c] for c in episode.class_ids])
        counter = ConfusionCounter(len(names))
        counter.add_batch(lookup[out.hard_labels()], lookup[episode.reveal_query_labels()])
        return counter

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counters = list(pool.map(run, range(n_episodes)))
    else:
        counters = [run(i) for i in range(n_episodes)]

    total = ConfusionCounter(len(names))
    seen = np.zeros(len(names), dtype=bool)
    seen[0] = True
    for episode, counter in zip(episodes, counters):
        total.merge(counter)
        seen[[global_index[c] for c in episode.class_ids]] = True

    report = report_from_confusion(total, names, seen, n_episodes, time.perf_counter() - start)
    logger.info("m-IoU = %.4f sobre %d episodios", report.miou, n_episodes)
    return report
