import numpy as np
import pytest

from src.autodiff import Graph, Tensor, backward, ops
from src.autodiff.tensor import ShapeError
from src.model.prototypes import (PrototypeSet, class_average, class_averages, farthest_point_sample,
                                  multi_prototype_sample)


def test_farthest_point_sample_starts_far_from_centroid():
    features = np.array([[0.0], [1.0], [10.0]])
    assert farthest_point_sample(features, 3).tolist() == [2, 0, 1]


def test_multi_prototype_shapes_and_labels():
    rng = np.random.default_rng(0)
    feats = Tensor(rng.normal(size=(30, 4)))
    labels = np.repeat([0, 1, 2], 10)
    multi = multi_prototype_sample(feats, labels, n_p=4)
    assert multi.features.shape == (12, 4)
    assert multi.labels.tolist() == [0] * 4 + [1] * 4 + [2] * 4
    assert multi.n_p == 4


def test_prototypes_are_means_of_own_class():
    rng = np.random.default_rng(1)
    data = np.vstack([rng.normal(0.0, 0.1, size=(8, 2)), rng.normal(5.0, 0.1, size=(8, 2))])
    multi = multi_prototype_sample(Tensor(data), np.repeat([0, 1], 8), n_p=2)
    # Cada grupo es una media de puntos de su clase: queda dentro de su caja
    assert np.all(multi.features.data[:2] < 1.0)
    assert np.all(multi.features.data[2:] > 4.0)


def test_more_prototypes_than_points_repeats_seeds():
    data = np.array([[0.0, 0.0], [1.0, 0.0], [4.0, 4.0], [5.0, 5.0]])
    multi = multi_prototype_sample(Tensor(data), np.array([0, 0, 1, 1]), n_p=3)
    class_one = {tuple(row) for row in multi.features.data[3:]}
    assert class_one == {(4.0, 4.0), (5.0, 5.0)}


def test_missing_class_raises():
    with pytest.raises(ValueError):
        multi_prototype_sample(Tensor(np.ones((3, 2))), np.array([0, 0, 0]), n_p=2, n_classes=2)


def test_prototype_gradient_flows_to_support_features():
    rng = np.random.default_rng(2)
    feats = Tensor(rng.normal(size=(12, 3)), requires_grad=True)
    labels = np.repeat([0, 1], 6)
    with Graph() as graph:
        multi = multi_prototype_sample(feats, labels, n_p=2)
        loss = ops.sum_all(multi.features)
    backward(graph, loss, [feats])
    # Cada fila de la matriz de promedios suma 1: el total es el número de prototipos
    np.testing.assert_allclose(feats.grad.sum(axis=0), np.full(3, 4.0))


def test_class_averages_match_numpy():
    rng = np.random.default_rng(3)
    data = rng.normal(size=(9, 2))
    labels = np.array([0, 1, 2, 0, 1, 2, 0, 1, 2])
    out = class_averages(Tensor(data), labels, 3)
    expected = np.stack([data[labels == c].mean(axis=0) for c in range(3)])
    np.testing.assert_allclose(out.data, expected)
    with pytest.raises(ValueError):
        class_average(Tensor(data), labels, 5)


def test_prototype_set_validation():
    a = Tensor(np.zeros((3, 2)))
    PrototypeSet(a, a, a, a, a).validate()
    with pytest.raises(ShapeError):
        PrototypeSet(a, a, a, a, Tensor(np.zeros((2, 2)))).validate()


def test_two_blobs_match_exhaustive_assignment():
    rng = np.random.default_rng(4)
    blob_a = rng.normal([0.0, 0.0, 0.0], 0.05, size=(10, 3))
    blob_b = rng.normal([4.0, 4.0, 4.0], 0.05, size=(14, 3))
    background = rng.normal(-3.0, 0.5, size=(6, 3))
    data = np.vstack([background, blob_a, blob_b])
    labels = np.array([0] * 6 + [1] * 24)
    multi = multi_prototype_sample(Tensor(data), labels, n_p=2)

    fg = data[labels == 1]
    seeds = fg[farthest_point_sample(fg, 2)]
    groups = [[], []]
    for point in fg:
        distances = [float(((point - seed) ** 2).sum()) for seed in seeds]
        groups[distances.index(min(distances))].append(point)
    expected = np.stack([np.mean(group, axis=0) for group in groups])
    np.testing.assert_allclose(multi.features.data[2:], expected, atol=1e-9)
    # Un prototipo por blob
    found = sorted(multi.features.data[2:].tolist())
    np.testing.assert_allclose(found, [blob_a.mean(axis=0), blob_b.mean(axis=0)], atol=1e-9)
