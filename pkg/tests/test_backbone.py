import numpy as np
import pytest

from src.autodiff import Graph, Tensor, backward, ops
from src.model.backbone import Backbone, EdgeConvBlock, knn_graph


def test_knn_excludes_self_and_breaks_ties_by_index():
    points = np.array([[0.0], [1.0], [2.0], [3.0]])
    neighbors = knn_graph(points, k=2)
    assert neighbors[1].tolist() == [0, 2]
    assert all(i not in row for i, row in enumerate(neighbors))
    with pytest.raises(ValueError):
        knn_graph(points, k=4)


def test_parameter_count_with_default_widths():
    backbone = Backbone(np.random.default_rng(0))
    expected = (12 * 64 + 64) + 2 * (128 * 64 + 64) + (192 * 64 + 64)
    assert backbone.num_parameters() == expected


def test_output_shape_and_gradients_reach_every_parameter():
    rng = np.random.default_rng(0)
    backbone = Backbone(rng, widths=(8, 8), out_dim=4, k=3)
    features = rng.normal(size=(20, 6))
    params = backbone.parameters()
    with Graph() as graph:
        out = backbone(features)
        loss = ops.sum_all(ops.mul(out, out))
    assert out.shape == (20, 4)
    backward(graph, loss, params)
    assert all(p.grad is not None and p.grad.shape == p.shape for p in params)
    assert all(np.any(p.grad != 0) for p in params)


def test_point_permutation_equivariance():
    rng = np.random.default_rng(1)
    backbone = Backbone(rng, widths=(8, 8), out_dim=4, k=3)
    features = rng.normal(size=(16, 6))
    perm = rng.permutation(16)
    np.testing.assert_allclose(backbone(features[perm]).data, backbone(features).data[perm], atol=1e-12)


def test_encode_uses_xyz_and_rgb(line_cloud):
    backbone = Backbone(np.random.default_rng(0), widths=(4,), out_dim=4, k=2)
    assert backbone.encode(line_cloud).shape == (8, 4)


def test_knn_matches_brute_force():
    features = np.random.default_rng(2).normal(size=(64, 8))
    neighbors = knn_graph(features, k=5, chunk=7)
    for i in range(64):
        dist = ((features[i] - features) ** 2).sum(axis=1)
        dist[i] = np.inf
        order = sorted(range(64), key=lambda j: (dist[j], j))
        assert neighbors[i].tolist() == order[:5]


def test_edge_conv_matches_hand_unrolled():
    rng = np.random.default_rng(3)
    block = EdgeConvBlock(3, 4, rng, slope=0.2)
    x = rng.normal(size=(7, 3))
    neighbors = knn_graph(x, k=2)
    out = block(Tensor(x), neighbors)

    w, b = block.linear.weight.data, block.linear.bias.data
    expected = np.empty((7, 4))
    for j in range(7):
        rows = []
        for n in neighbors[j]:
            hidden = np.concatenate([x[j], x[n] - x[j]]) @ w + b
            rows.append(np.where(hidden > 0, hidden, 0.2 * hidden))
        expected[j] = np.max(rows, axis=0)
    np.testing.assert_allclose(out.data, expected, atol=1e-12)
