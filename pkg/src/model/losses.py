#Pérdidas de entrenamiento: segmentación, contrastiva entre primer plano y alineamiento texto-visual

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.autodiff import Tensor, ops
from src.autodiff.tensor import ShapeError
from src.config import LossWeights

logger = logging.getLogger(__name__)


@dataclass
class LossDiagnostics:
    """Contadores de casos degenerados acumulados durante el entrenamiento"""
    degenerate_con: int = 0


def seg_loss(probs: Tensor, labels: np.ndarray) -> Tensor:
    """-(1/M)·Σ log Ŷ[j, Y[j]]"""
    return ops.nll(probs, labels)


def sample_contrastive_pairs(support_labels: np.ndarray, query_labels: np.ndarray, rng: np.random.Generator,
                             max_pairs: int = 64) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Muestrea pares positivos soporte/query de cada clase de primer plano.

    Hasta max_pairs pares distintos por clase, uniformes sobre el producto
    de puntos de soporte y query de esa clase.

    Returns:
        (índices de soporte, índices de query, clase de cada par)
    """
    support_idx, query_idx, pair_labels = [], [], []
    for c in np.unique(support_labels):
        if c == 0:
            continue
        s = np.flatnonzero(support_labels == c)
        q = np.flatnonzero(query_labels == c)
        if s.size == 0 or q.size == 0:
            continue
        total = s.size * q.size
        flat = rng.choice(total, size=min(max_pairs, total), replace=False)
        support_idx.append(s[flat // q.size])
        query_idx.append(q[flat % q.size])
        pair_labels.append(np.full(flat.size, c))
    if not pair_labels:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    return np.concatenate(support_idx), np.concatenate(query_idx), np.concatenate(pair_labels).astype(np.int64)


def con_loss(support_fg_feats: Tensor, query_fg_feats: Tensor, pair_labels: np.ndarray, tau: float = 0.5,
             normalize: bool = True, diagnostics: Optional[LossDiagnostics] = None) -> Tensor:
    """
    InfoNCE simétrica sobre pares positivos de primer plano.

    La fila i de cada matriz forma el par positivo i. Los candidatos de un
    par son él mismo y los pares de otras clases; los pares de la misma
    clase no cuentan como negativos.

    Args:
        support_fg_feats: (P, D)
        query_fg_feats: (P, D)
        pair_labels: Clase de cada par (P,)
        tau: Temperatura
        normalize: Normalizar L2 antes del producto escalar
        diagnostics: Contadores opcionales

    Returns:
        Escalar; 0 si no hay al menos dos clases entre los pares
    """
    pair_labels = np.asarray(pair_labels, dtype=np.int64)
    if support_fg_feats.shape != query_fg_feats.shape or support_fg_feats.shape[0] != pair_labels.shape[0]:
        raise ShapeError(f"con_loss: formas {support_fg_feats.shape}, {query_fg_feats.shape}, {pair_labels.shape}")
    if np.unique(pair_labels).size < 2:
        if diagnostics is not None:
            diagnostics.degenerate_con += 1
        logger.warning("con_loss: episodio sin negativos, contribución 0")
        return Tensor(0.0)

    s, q = support_fg_feats, query_fg_feats
    if normalize:
        s, q = ops.l2_normalize(s), ops.l2_normalize(q)
    logits = ops.scale(ops.matmul(s, ops.transpose(q)), 1.0 / tau)
    n = pair_labels.shape[0]
    candidates = (pair_labels[:, None] != pair_labels[None, :]) | np.eye(n, dtype=bool)
    targets = np.arange(n)
    forward = ops.cross_entropy(logits, targets, candidates)
    backward = ops.cross_entropy(ops.transpose(logits), targets, candidates.T)
    return ops.scale(ops.add(forward, backward), 0.5)


def align_loss(p_raw_fg: Tensor, text_embeds: np.ndarray, weight: Tensor) -> Tensor:
    """
    Clasificación de cada prototipo bruto contra los N embeddings de texto.

    logits[c, b] = (p_raw^c · W) · T^b, objetivo c; media sobre c.

    Args:
        p_raw_fg: Prototipos de primer plano (N, D), sin fondo
        text_embeds: (N, D_text)
        weight: W (D, D_text)
    """
    n = p_raw_fg.shape[0]
    if n == 0:
        raise ValueError("align_loss: se necesita al menos una clase de primer plano")
    text_embeds = np.asarray(text_embeds, dtype=np.float64)
    if text_embeds.shape != (n, weight.shape[1]):
        raise ShapeError(f"align_loss: texto {text_embeds.shape} para {n} prototipos y W {weight.shape}")
    logits = ops.matmul(ops.matmul(p_raw_fg, weight), Tensor(text_embeds.T))
    return ops.cross_entropy(logits, np.arange(n))


def total_loss(seg: Tensor, con: Tensor, align: Tensor, weights: LossWeights) -> Tensor:
    """L = L_seg + λ_con·L_con + λ_align·L_align"""
    return ops.add(seg, ops.add(ops.scale(con, weights.con), ops.scale(align, weights.align)))
