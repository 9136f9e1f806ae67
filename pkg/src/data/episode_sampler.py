#Muestreo de episodios N-way K-shot a partir de un corpus de bloques

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .point_cloud import Episode, PointCloud

logger = logging.getLogger(__name__)


class EpisodeSamplingError(ValueError):
    """El corpus no tiene suficientes clases o bloques para el episodio pedido"""


@dataclass
class BlockCorpus:
    """Bloques de entrenamiento/test con la partición de clases"""
    blocks: List[PointCloud]
    class_names: Dict[int, str]
    train_classes: List[int]
    test_classes: List[int]
    min_points: int = 1
    eligible: Dict[int, List[int]] = field(default_factory=dict)

    def __post_init__(self):
        overlap = set(self.train_classes) & set(self.test_classes)
        if overlap:
            raise EpisodeSamplingError(f"Las particiones de clases no son disjuntas: {sorted(overlap)}")
        if not self.eligible:
            self.eligible = {c: [] for c in list(self.train_classes) + list(self.test_classes)}
            for b, block in enumerate(self.blocks):
                counts = block.class_counts()
                for c in self.eligible:
                    if counts.get(c, 0) >= self.min_points:
                        self.eligible[c].append(b)

    def classes(self, split: str) -> List[int]:
        if split not in ("train", "test"):
            raise ValueError(f"Partición desconocida: {split}")
        return list(self.train_classes if split == "train" else self.test_classes)


def _remap(labels: np.ndarray, class_ids: Sequence[int]) -> np.ndarray:
    """Etiquetas de episodio: clase i-ésima -> i + 1, el resto -> 0 (fondo)"""
    remapped = np.zeros_like(labels)
    for i, c in enumerate(class_ids):
        remapped[labels == c] = i + 1
    return remapped


def sample_episode(corpus: BlockCorpus, n_way: int, k_shot: int, rng: np.random.Generator,
                   split: str = "train", max_tries: int = 100) -> Episode:
    """
    Muestrea un episodio N-way K-shot.

    Args:
        corpus: Corpus de bloques
        n_way: Número de clases N
        k_shot: Ejemplos de soporte por clase K
        rng: Generador aleatorio
        split: "train" o "test"; sólo se usan clases de esa partición
        max_tries: Intentos de rechazo para evitar queries sólo de fondo

    Returns:
        Episode con orden de puntos barajado en cada nube
    """
    candidates = [c for c in corpus.classes(split) if len(corpus.eligible.get(c, [])) >= k_shot + 1]
    if len(candidates) < n_way:
        counts = {c: len(corpus.eligible.get(c, [])) for c in corpus.classes(split)}
        raise EpisodeSamplingError(
            f"Se necesitan {n_way} clases con al menos {k_shot + 1} bloques; recuentos: {counts}")

    for _ in range(max_tries):
        class_ids = [int(c) for c in rng.choice(candidates, size=n_way, replace=False)]
        used = set()
        support, masks = [], []
        for c in class_ids:
            pool = [b for b in corpus.eligible[c] if b not in used]
            if len(pool) < k_shot + 1:
                break
            chosen = [int(b) for b in rng.choice(pool, size=k_shot, replace=False)]
            used.update(chosen)
            shots, shot_masks = [], []
            for b in chosen:
                block = corpus.blocks[b]
                order = rng.permutation(len(block))
                cloud = block.subset(order)
                shots.append(cloud)
                shot_masks.append(cloud.labels == c)
            support.append(shots)
            masks.append(shot_masks)
        else:
            query_pool = sorted({b for c in class_ids for b in corpus.eligible[c]} - used)
            if not query_pool:
                continue
            q = int(rng.choice(query_pool))
            query = corpus.blocks[q].subset(rng.permutation(len(corpus.blocks[q])))
            query_labels = _remap(query.labels, class_ids)
            if not np.any(query_labels > 0):
                continue
            return Episode(n_way=n_way, k_shot=k_shot, _support=support, _support_masks=masks,
                           query=query, _query_labels=query_labels,
                           class_names=[corpus.class_names[c] for c in class_ids], class_ids=class_ids)

    raise EpisodeSamplingError(f"No se pudo muestrear un episodio válido tras {max_tries} intentos")
