#Prototipos guiados por lenguaje (LGPE)
#Proyección de embeddings de texto, calendario de pesos de fusión y mezcla de prototipos

import math
from typing import Optional, Sequence, Tuple

import numpy as np

from src.autodiff import Linear, Module, Tensor, ops
from src.autodiff.module import gaussian
from src.autodiff.tensor import ShapeError

from .text_embeddings import TextEmbeddingTable

DEFAULT_LAMBDA_STAR = (1.0, 0.5, 0.7, 0.6)
ZERO_SHOT_WEIGHTS = (0.0, 0.0, 0.0, 1.0)


def fusion_weights(t: float, lambda_star: Sequence[float] = DEFAULT_LAMBDA_STAR,
                   rate: float = 0.5) -> Tuple[float, float, float, float]:
    """
    Pesos (λ1, λ2, λ3, λ4) en el progreso t.

    λ4 decae como λ4*·exp(-rate·t); λ1..λ3 crecen como λi*·(1 - exp(-rate·t)).
    """
    if t < 0:
        raise ValueError(f"t debe ser >= 0, se recibió {t}")
    decay = math.exp(-rate * t)
    l1, l2, l3, l4 = (float(v) for v in lambda_star)
    return l1 * (1.0 - decay), l2 * (1.0 - decay), l3 * (1.0 - decay), l4 * decay


def fuse_prototypes(token: Tensor, raw: Tensor, dyn: Tensor, text: Tensor, t: float,
                    lambda_star: Sequence[float] = DEFAULT_LAMBDA_STAR, rate: float = 0.5,
                    zero_shot: bool = False) -> Tensor:
    """
    Combinación afín p = λ1·token + λ2·raw + λ3·dyn + λ4·text.

    En modo zero-shot los pesos son (0, 0, 0, 1) y se devuelve text tal cual.
    """
    shapes = {token.shape, raw.shape, dyn.shape, text.shape}
    if len(shapes) != 1:
        raise ShapeError(f"fuse_prototypes: formas distintas {sorted(shapes)}")
    if zero_shot:
        return text
    weights = fusion_weights(t, lambda_star, rate)
    fused = ops.scale(token, weights[0])
    for weight, proto in zip(weights[1:], (raw, dyn, text)):
        fused = ops.add(fused, ops.scale(proto, weight))
    return fused


class TextProjection(Module):
    """Proj: MLP de dos capas D_text -> D -> D con leaky-ReLU"""

    def __init__(self, d_text: int, d: int, rng: np.random.Generator, slope: float = 0.2,
                 zero_final: bool = False):
        self.hidden = Linear(d_text, d, rng)
        self.output = Linear(d, d, rng, zero=zero_final)
        self.slope = slope

    def __call__(self, text: Tensor) -> Tensor:
        return self.output(ops.leaky_relu(self.hidden(text), self.slope))


def project_text(text: np.ndarray, proj: TextProjection) -> Tensor:
    """Proyecta uno o varios embeddings de texto: (D_text,) o (n, D_text) -> (n, D)"""
    return proj(Tensor(np.atleast_2d(np.asarray(text, dtype=np.float64))))


class LanguageGuidedPrototypes(Module):
    """
    Prototipos de texto del episodio.

    El fondo no tiene nombre natural: usa un vector D_text aprendible que pasa
    por Proj como cualquier otra clase.
    """

    def __init__(self, d_text: int, d: int, rng: np.random.Generator, slope: float = 0.2):
        self.background = gaussian(rng, (1, d_text), 1.0 / math.sqrt(d_text), "background")
        self.proj = TextProjection(d_text, d, rng, slope)

    def class_embeddings(self, class_names: Sequence[str], table: TextEmbeddingTable) -> np.ndarray:
        """Embeddings brutos T^c de las clases de primer plano: (N, D_text)"""
        if table.dim != self.background.shape[1]:
            raise ShapeError(f"Tabla con D_text={table.dim}, el modelo usa {self.background.shape[1]}")
        return table.matrix(class_names)

    def text_prototypes(self, class_names: Sequence[str], table: TextEmbeddingTable) -> Tensor:
        """p_text: (N+1, D) con el fondo en la fila 0"""
        fg = Tensor(self.class_embeddings(class_names, table))
        return self.proj(ops.concat([self.background, fg], axis=0))


def maybe_text_prototypes(lgpe: Optional[LanguageGuidedPrototypes], class_names: Sequence[str],
                          table: Optional[TextEmbeddingTable]) -> Optional[Tensor]:
    if lgpe is None or table is None:
        return None
    return lgpe.text_prototypes(class_names, table)
