#Extractor de features estilo DGCNN entrenado desde cero
#Bloques EdgeConv con grafo dinámico, concatenación de salidas y proyección final a D

from typing import List, Sequence

import numpy as np

from src.autodiff import Module, Linear, Tensor, ops
from src.autodiff.tensor import ShapeError


def knn_graph(features: np.ndarray, k: int, chunk: int = 32) -> np.ndarray:
    """
    Vecinos más cercanos por distancia euclídea, excluyendo el propio punto.

    Args:
        features: Matriz (M, d)
        k: Número de vecinos, k < M
        chunk: Filas procesadas a la vez

    Returns:
        Matriz (M, k) de índices; empates resueltos por el índice menor
    """
    features = np.asarray(features, dtype=np.float64)
    m = features.shape[0]
    if k >= m:
        raise ValueError(f"k={k} debe ser menor que el número de puntos M={m}")
    neighbors = np.empty((m, k), dtype=np.int64)
    for start in range(0, m, chunk):
        rows = np.arange(start, min(start + chunk, m))
        dist = ((features[rows, None, :] - features[None, :, :]) ** 2).sum(axis=2)
        dist[np.arange(rows.size), rows] = np.inf
        neighbors[rows] = np.argsort(dist, axis=1, kind="stable")[:, :k]
    return neighbors


class EdgeConvBlock(Module):
    """Bloque EdgeConv: MLP compartido sobre [x_j ; x_n - x_j] y máximo sobre vecinos"""

    def __init__(self, d_in: int, d_out: int, rng: np.random.Generator, slope: float = 0.2):
        self.linear = Linear(2 * d_in, d_out, rng)
        self.slope = slope

    def __call__(self, x: Tensor, neighbors: np.ndarray) -> Tensor:
        m, k = neighbors.shape
        if x.shape[0] != m:
            raise ShapeError(f"EdgeConv: {x.shape[0]} puntos y grafo de {m} filas")
        center = ops.gather_rows(x, np.repeat(np.arange(m), k))
        neighbor = ops.gather_rows(x, neighbors.reshape(-1))
        edge = ops.concat([center, ops.sub(neighbor, center)], axis=1)
        hidden = ops.leaky_relu(self.linear(edge), self.slope)
        return ops.group_max(hidden, k)


class Backbone(Module):
    """Pila de bloques EdgeConv con concatenación de salidas y proyección lineal a D"""

    def __init__(self, rng: np.random.Generator, d_in: int = 6, widths: Sequence[int] = (64, 64, 64),
                 out_dim: int = 64, k: int = 20, slope: float = 0.2):
        self.k = k
        dims = [d_in] + list(widths)
        self.blocks: List[EdgeConvBlock] = [EdgeConvBlock(dims[i], dims[i + 1], rng, slope) for i in range(len(widths))]
        self.projection = Linear(sum(widths), out_dim, rng)

    def __call__(self, features: np.ndarray) -> Tensor:
        """
        Codifica una nube.

        Args:
            features: Canales de entrada (M, 6) = xyz ⊕ rgb

        Returns:
            Tensor (M, D)
        """
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2:
            raise ShapeError(f"Backbone: se esperaba (M, d), forma {features.shape}")
        h = Tensor(features)
        outputs = []
        for i, block in enumerate(self.blocks):
            # El primer grafo se construye sobre xyz; los siguientes sobre las features
            graph_space = features[:, :3] if i == 0 else h.data
            h = block(h, knn_graph(graph_space, self.k))
            outputs.append(h)
        return self.projection(ops.concat(outputs, axis=1))

    def encode(self, cloud) -> Tensor:
        return self(cloud.features)
