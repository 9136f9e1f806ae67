#Codificación posicional relativa dual (DRPE) y atención cruzada con término relativo

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from src.autodiff import Linear, Module, Tensor, ops
from src.autodiff.tensor import ShapeError
from src.config import DRPE_MODES

ArrayLike = Union[float, np.ndarray]


def sin_emb(l: ArrayLike, d: int, gamma: float = 10000.0) -> np.ndarray:
    """
    Embedding sinusoidal de índices reales.

    Pares intercalados [sin(l/γ^(2i/D)), cos(l/γ^(2i/D))] para i = 0..D/2-1.

    Args:
        l: Escalar o array de índices (no tienen por qué ser enteros)
        d: Dimensión par
        gamma: Escala de frecuencias

    Returns:
        Array con forma l.shape + (d,)
    """
    if d % 2:
        raise ValueError(f"sin_emb requiere D par, se recibió {d}")
    l = np.asarray(l, dtype=np.float64)
    freqs = gamma ** (np.arange(0, d, 2) / d)
    angles = l[..., None] / freqs
    out = np.empty(l.shape + (d,))
    out[..., 0::2] = np.sin(angles)
    out[..., 1::2] = np.cos(angles)
    return out


@dataclass
class DrpeTensor:
    """R = R_E + R_C con las distancias de origen; todo constante"""
    r: np.ndarray
    r_e: np.ndarray
    r_c: np.ndarray
    d_e: np.ndarray
    d_c: np.ndarray

    @property
    def shape(self):
        return self.r.shape

    def transposed(self) -> np.ndarray:
        """Vista (N+1, M, D) para la llamada del lado de los prototipos"""
        return np.ascontiguousarray(self.r.transpose(1, 0, 2))


def _values(x: Union[Tensor, np.ndarray]) -> Tensor:
    return Tensor(x.data if isinstance(x, Tensor) else np.asarray(x, dtype=np.float64))


def compute_drpe(query_feats: Union[Tensor, np.ndarray], prototypes: Union[Tensor, np.ndarray],
                 scale_euclid: float = 1.0, scale_cosine: float = math.pi, gamma: float = 10000.0,
                 use_euclid: bool = True, use_cosine: bool = True) -> DrpeTensor:
    """
    Calcula R a partir de distancias en el espacio latente.

    Args:
        query_feats: (M, D)
        prototypes: (N+1, D)
        scale_euclid: s_E aplicado a la distancia euclídea
        scale_cosine: s_C aplicado a la similitud coseno
        gamma: Escala del embedding sinusoidal
        use_euclid: Si es False, R_E = 0
        use_cosine: Si es False, R_C = 0

    Returns:
        DrpeTensor con R de forma (M, N+1, D); sin gradiente
    """
    q, p = _values(query_feats), _values(prototypes)
    if q.data.ndim != 2 or p.data.ndim != 2 or q.shape[1] != p.shape[1]:
        raise ShapeError(f"compute_drpe: formas incompatibles {q.shape} y {p.shape}")
    d = q.shape[1]
    d_e = ops.pairwise_euclidean(q, p).data
    d_c = ops.pairwise_cosine(q, p).data
    zeros = np.zeros(d_e.shape + (d,))
    r_e = sin_emb(scale_euclid * d_e, d, gamma) if use_euclid else zeros
    r_c = sin_emb(scale_cosine * d_c, d, gamma) if use_cosine else zeros
    return DrpeTensor(r=r_e + r_c, r_e=r_e, r_c=r_c, d_e=d_e, d_c=d_c)


class DrpeCrossAttention(Module):
    """
    Atención cruzada CRA(Q, K, V, R) con residual.

    mode="logits": logit(a, b) = (q_a·k_b + q_a·R[a, b, :]) / √D.
    mode="keys": R se proyecta y se suma a la clave,
    logit(a, b) = q_a·(k_b + R[a, b, :] W_r) / √D.
    Sin R ambos modos son la atención cruzada estándar.
    """

    def __init__(self, d: int, rng: np.random.Generator, mode: str = "logits"):
        if mode not in DRPE_MODES:
            raise ValueError(f"Modo DRPE desconocido: {mode}; opciones {DRPE_MODES}")
        self.d = d
        self.mode = mode
        self.w_q = Linear(d, d, rng, bias=False)
        self.w_k = Linear(d, d, rng, bias=False)
        self.w_v = Linear(d, d, rng, bias=False)
        self.w_o = Linear(d, d, rng, bias=False)
        self.w_r: Optional[Linear] = Linear(d, d, rng, bias=False) if mode == "keys" else None

    def __call__(self, q_tokens: Tensor, kv_tokens: Tensor, rel: Optional[np.ndarray] = None) -> Tensor:
        if rel is not None and rel.shape != (q_tokens.shape[0], kv_tokens.shape[0], self.d):
            raise ShapeError(f"CRA: R con forma {rel.shape} para {q_tokens.shape} x {kv_tokens.shape}")
        q = self.w_q(q_tokens)
        k = self.w_k(kv_tokens)
        v = self.w_v(kv_tokens)
        logits = ops.matmul(q, ops.transpose(k))
        if rel is not None:
            # q·(R W_r) = (q W_rᵀ)·R
            q_rel = ops.matmul(q, ops.transpose(self.w_r.weight)) if self.w_r is not None else q
            logits = ops.add(logits, ops.relative_logits(q_rel, rel))
        weights = ops.softmax(ops.scale(logits, 1.0 / math.sqrt(self.d)))
        return ops.add(q_tokens, self.w_o(ops.matmul(weights, v)))
