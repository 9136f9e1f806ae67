import logging

import numpy as np
import pytest

from src.autodiff import Tensor, finite_diff_check
from src.config import LossWeights
from src.model.losses import (LossDiagnostics, align_loss, con_loss, sample_contrastive_pairs, seg_loss,
                              total_loss)


def test_seg_loss_uniform_prediction():
    probs = Tensor(np.full((4, 3), 1 / 3))
    assert seg_loss(probs, np.array([0, 1, 2, 0])).item() == pytest.approx(np.log(3))


def test_con_loss_two_opposite_pairs():
    e1 = np.array([1.0, 0.0])
    s = Tensor(np.stack([e1, -e1]))
    q = Tensor(np.stack([e1, -e1]))
    loss = con_loss(s, q, np.array([1, 2]), tau=0.5)
    assert loss.item() == pytest.approx(np.log1p(np.exp(-4.0)), abs=1e-6)
    assert loss.item() == pytest.approx(0.018149, abs=1e-6)


def test_con_loss_ignores_same_class_negatives():
    rng = np.random.default_rng(0)
    s, q = rng.normal(size=(4, 3)), rng.normal(size=(4, 3))
    labels = np.array([1, 1, 2, 2])
    loss = con_loss(Tensor(s), Tensor(q), labels, tau=0.5)

    sn = s / np.linalg.norm(s, axis=1, keepdims=True)
    qn = q / np.linalg.norm(q, axis=1, keepdims=True)
    logits = sn @ qn.T / 0.5
    allowed = (labels[:, None] != labels[None, :]) | np.eye(4, dtype=bool)

    def ce(mat, mask):
        masked = np.where(mask, mat, -np.inf)
        log_z = np.log(np.exp(masked).sum(axis=1))
        return np.mean(log_z - np.diag(mat))

    expected = 0.5 * (ce(logits, allowed) + ce(logits.T, allowed.T))
    assert loss.item() == pytest.approx(expected)


def test_con_loss_single_class_is_degenerate(caplog):
    diagnostics = LossDiagnostics()
    feats = Tensor(np.ones((3, 2)))
    with caplog.at_level(logging.WARNING, logger="src.model.losses"):
        loss = con_loss(feats, feats, np.array([1, 1, 1]), diagnostics=diagnostics)
    assert any(r.levelno == logging.WARNING and "sin negativos" in r.getMessage() for r in caplog.records)
    assert loss.item() == 0.0
    assert diagnostics.degenerate_con == 1


def test_con_loss_gradient():
    rng = np.random.default_rng(1)
    q = Tensor(rng.normal(size=(4, 3)))
    labels = np.array([1, 2, 1, 2])
    s = Tensor(rng.normal(size=(4, 3)))
    assert finite_diff_check(lambda x: con_loss(x, q, labels), s) < 1e-4


def test_sample_contrastive_pairs():
    support = np.array([0, 1, 1, 2, 2, 2])
    query = np.array([1, 1, 2, 0, 0])
    s_idx, q_idx, labels = sample_contrastive_pairs(support, query, np.random.default_rng(0), max_pairs=3)
    assert np.all(support[s_idx] == labels)
    assert np.all(query[q_idx] == labels)
    assert (labels == 1).sum() == 3
    assert (labels == 2).sum() == 3
    assert len(set(zip(s_idx.tolist(), q_idx.tolist()))) == labels.size
    assert 0 not in labels


def test_sample_contrastive_pairs_without_overlap():
    s_idx, q_idx, labels = sample_contrastive_pairs(np.array([0, 1]), np.array([0, 2]), np.random.default_rng(0))
    assert labels.size == 0 and s_idx.size == 0 and q_idx.size == 0


def test_align_loss_reference_value():
    loss = align_loss(Tensor(np.array([[2.0, 0.0], [0.0, 2.0]])), np.eye(2), Tensor(np.eye(2)))
    assert loss.item() == pytest.approx(0.1269, abs=1e-4)
    with pytest.raises(ValueError):
        align_loss(Tensor(np.zeros((2, 2))), np.eye(3), Tensor(np.eye(2)))


def test_total_loss_weights():
    total = total_loss(Tensor(1.0), Tensor(2.0), Tensor(3.0), LossWeights())
    assert total.item() == pytest.approx(1.08)


def test_con_loss_is_rotation_invariant():
    rng = np.random.default_rng(2)
    s, q = rng.normal(size=(6, 4)), rng.normal(size=(6, 4))
    labels = np.array([1, 2, 3, 1, 2, 3])
    rotation, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    base = con_loss(Tensor(s), Tensor(q), labels).item()
    rotated = con_loss(Tensor(s @ rotation), Tensor(q @ rotation), labels).item()
    assert rotated == pytest.approx(base, abs=1e-9)


def test_align_loss_gradients():
    rng = np.random.default_rng(3)
    p_raw = Tensor(rng.normal(size=(3, 4)))
    text = rng.normal(size=(3, 5))
    weight = Tensor(rng.normal(size=(4, 5)))
    assert finite_diff_check(lambda x: align_loss(x, text, weight), p_raw) < 1e-4
    assert finite_diff_check(lambda w: align_loss(p_raw, text, w), weight) < 1e-4
