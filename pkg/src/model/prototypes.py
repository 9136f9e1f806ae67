#Muestreo multi-prototipo y promedios por clase
#Los índices de agrupamiento se calculan sin gradiente; las medias sí son diferenciables

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.autodiff import Tensor, ops
from src.autodiff.tensor import ShapeError


@dataclass
class MultiPrototype:
    """Prototipos múltiples de un episodio: n_p por clase, fondo incluido"""
    features: Tensor
    labels: np.ndarray
    n_p: int


@dataclass
class PrototypeSet:
    """Prototipos en sus cinco papeles; todas las matrices son (N+1, D) con el fondo primero"""
    raw: Tensor
    dynamic: Tensor
    text: Tensor
    token: Tensor
    fused: Tensor

    def validate(self) -> None:
        shapes = {m.shape for m in (self.raw, self.dynamic, self.text, self.token, self.fused)}
        if len(shapes) != 1:
            raise ShapeError(f"PrototypeSet con formas distintas: {sorted(shapes)}")


def farthest_point_sample(features: np.ndarray, n: int) -> np.ndarray:
    """
    Muestreo por punto más lejano en el espacio de features.

    Empieza por el punto más alejado del centroide. Si n supera el número de
    puntos, las semillas se repiten.

    Args:
        features: Matriz (n_c, D)
        n: Número de semillas

    Returns:
        Índices (n,) de las semillas
    """
    centroid = features.mean(axis=0)
    start = int(np.argmax(((features - centroid) ** 2).sum(axis=1)))
    seeds = [start]
    min_dist = ((features - features[start]) ** 2).sum(axis=1)
    for _ in range(1, n):
        nxt = int(np.argmax(min_dist))
        seeds.append(nxt)
        min_dist = np.minimum(min_dist, ((features - features[nxt]) ** 2).sum(axis=1))
    return np.asarray(seeds, dtype=np.int64)


def multi_prototype_sample(support_features: Tensor, support_labels: np.ndarray, n_p: int,
                           n_classes: Optional[int] = None, rng: Optional[np.random.Generator] = None,
                           max_candidates: Optional[int] = None) -> MultiPrototype:
    """
    Descompone las features de soporte de cada clase en n_p prototipos.

    Por clase: FPS de n_p semillas, asignación de cada punto a la semilla más
    cercana y media de cada grupo. Los grupos vacíos heredan la feature de su
    semilla.

    Args:
        support_features: Tensor (n_total, D)
        support_labels: Clase de episodio por punto en {0..N}
        n_p: Prototipos por clase
        n_classes: N + 1; por defecto max(label) + 1
        rng: Generador para submuestrear clases con más de max_candidates puntos
        max_candidates: Límite opcional de puntos por clase

    Returns:
        MultiPrototype con ((N+1)·n_p, D) features
    """
    labels = np.asarray(support_labels, dtype=np.int64)
    if labels.shape != (support_features.shape[0],):
        raise ShapeError(f"Etiquetas {labels.shape} para features {support_features.shape}")
    n_classes = int(labels.max()) + 1 if n_classes is None else n_classes
    data = support_features.data
    rows: List[np.ndarray] = []
    proto_labels = []

    for c in range(n_classes):
        idx = np.flatnonzero(labels == c)
        if idx.size == 0:
            raise ValueError(f"La clase {c} no tiene puntos de soporte")
        if max_candidates is not None and idx.size > max_candidates:
            rng = rng if rng is not None else np.random.default_rng(0)
            idx = np.sort(rng.choice(idx, size=max_candidates, replace=False))
        feats = data[idx]
        seeds = farthest_point_sample(feats, n_p)
        seed_feats = feats[seeds]
        dist = ((feats[:, None, :] - seed_feats[None, :, :]) ** 2).sum(axis=2)
        assign = np.argmin(dist, axis=1)
        for s in range(n_p):
            members = idx[assign == s]
            if members.size == 0:
                members = idx[seeds[s:s + 1]]
            row = np.zeros(data.shape[0])
            row[members] = 1.0 / members.size
            rows.append(row)
            proto_labels.append(c)

    averaging = Tensor(np.stack(rows))
    return MultiPrototype(ops.matmul(averaging, support_features), np.asarray(proto_labels), n_p)


def class_average(features: Tensor, labels: np.ndarray, c: int) -> Tensor:
    """
    Media aritmética de las filas con etiqueta c.

    Returns:
        Tensor (1, D)
    """
    mask = np.asarray(labels) == c
    if not mask.any():
        raise ValueError(f"No hay filas con etiqueta {c}")
    return ops.masked_mean(features, mask)


def class_averages(features: Tensor, labels: np.ndarray, n_classes: int) -> Tensor:
    """Promedios de todas las clases apilados en orden: (N+1, D)"""
    return ops.concat([class_average(features, labels, c) for c in range(n_classes)], axis=0)
