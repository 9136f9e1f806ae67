import numpy as np
import pytest

from src.autodiff import (GradCheckError, Graph, Linear, NonFiniteError, ShapeError, Tensor, backward,
                          finite_diff_check, ops)

TOL = 1e-4


def weighted_head(shape, seed=0):
    """Cabeza escalar Σ W ⊙ out con pesos aleatorios fijos"""
    weights = Tensor(np.random.default_rng(seed).normal(size=shape))
    return lambda out: ops.sum_all(ops.mul(out, weights))


@pytest.fixture
def x():
    return Tensor(np.random.default_rng(0).normal(size=(4, 3)))


def test_matmul_gradient(x):
    other = Tensor(np.random.default_rng(1).normal(size=(3, 5)))
    head = weighted_head((4, 5))
    assert finite_diff_check(lambda t: head(ops.matmul(t, other)), x) < TOL


def test_softmax_gradient(x):
    head = weighted_head((4, 3))
    assert finite_diff_check(lambda t: head(ops.softmax(t)), x) < TOL


def test_l2_normalize_gradient(x):
    head = weighted_head((4, 3))
    assert finite_diff_check(lambda t: head(ops.l2_normalize(t)), x) < TOL


def test_masked_cross_entropy_gradient(x):
    targets = np.array([0, 1, 2, 0])
    mask = np.array([[1, 0, 1], [1, 1, 0], [0, 1, 1], [1, 1, 1]], dtype=bool)
    assert finite_diff_check(lambda t: ops.cross_entropy(t, targets, mask), x) < TOL


def test_nll_over_softmax_gradient(x):
    targets = np.array([2, 0, 1, 1])
    assert finite_diff_check(lambda t: ops.nll(ops.softmax(t), targets), x) < TOL


def test_pairwise_distances_gradient(x):
    other = Tensor(np.random.default_rng(2).normal(size=(2, 3)))
    head = weighted_head((4, 2))
    assert finite_diff_check(lambda t: head(ops.pairwise_euclidean(t, other)), x) < TOL
    assert finite_diff_check(lambda t: head(ops.pairwise_cosine(t, other)), x) < TOL


def test_relative_logits_gradient(x):
    rel = np.random.default_rng(3).normal(size=(4, 2, 3))
    head = weighted_head((4, 2))
    assert finite_diff_check(lambda t: head(ops.relative_logits(t, rel)), x) < TOL


@pytest.mark.parametrize("op", [
    lambda t: ops.group_max(t, 2),
    lambda t: ops.gather_rows(t, np.array([0, 0, 3])),
    lambda t: ops.mean_rows(t),
    lambda t: ops.masked_mean(t, np.array([True, False, True, True])),
    lambda t: ops.concat([t, ops.scale(t, 2.0)], axis=1),
    lambda t: ops.slice_rows(t, 1, 3),
    lambda t: ops.sin(t),
    lambda t: ops.cos(t),
    lambda t: ops.exp(t),
    lambda t: ops.leaky_relu(ops.add_row(t, Tensor(np.full(3, 10.0))), 0.2),
])
def test_structural_ops_gradients(x, op):
    out_shape = op(x).shape
    head = weighted_head(out_shape, seed=5)
    assert finite_diff_check(lambda t: head(op(t)), x) < TOL


def test_log_gradient():
    positive = Tensor(np.random.default_rng(4).uniform(0.5, 2.0, size=(3, 2)))
    head = weighted_head((3, 2))
    assert finite_diff_check(lambda t: head(ops.log(t)), positive) < TOL


def test_shared_input_accumulates_gradient():
    a = Tensor(np.ones((2, 2)), requires_grad=True)
    with Graph() as graph:
        loss = ops.sum_all(ops.add(a, a))
    backward(graph, loss)
    np.testing.assert_allclose(a.grad, np.full((2, 2), 2.0))


def test_unreachable_leaf_gets_zero_gradient():
    a = Tensor(np.ones(3), requires_grad=True)
    unused = Tensor(np.ones((2, 2)), requires_grad=True)
    with Graph() as graph:
        loss = ops.sum_all(a)
    backward(graph, loss, leaves=[a, unused])
    np.testing.assert_array_equal(unused.grad, np.zeros((2, 2)))
    np.testing.assert_array_equal(a.grad, np.ones(3))


def test_no_graph_records_nothing():
    a = Tensor(np.ones((2, 2)), requires_grad=True)
    with Graph() as graph:
        ops.matmul(Tensor(np.ones((2, 2))), Tensor(np.ones((2, 2))))
        ops.scale(a, 2.0)
    assert len(graph) == 1
    assert Graph.current() is None


def test_non_finite_value_raises():
    with pytest.raises(NonFiniteError) as info:
        ops.log(Tensor(np.zeros((1, 1))))
    assert info.value.op == "log"


def test_shape_errors():
    with pytest.raises(ShapeError):
        ops.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))
    with pytest.raises(ShapeError):
        ops.add(Tensor(np.ones(2)), Tensor(np.ones(3)))
    with Graph() as graph:
        out = ops.scale(Tensor(np.ones(2), requires_grad=True), 1.0)
    with pytest.raises(ShapeError):
        backward(graph, out)


def test_cross_entropy_rejects_mask_without_target():
    logits = Tensor(np.zeros((1, 2)))
    with pytest.raises(ValueError):
        ops.cross_entropy(logits, np.array([1]), np.array([[True, False]]))


def test_l2_normalize_keeps_zero_rows():
    out = ops.l2_normalize(Tensor(np.array([[0.0, 0.0], [3.0, 4.0]])))
    np.testing.assert_allclose(out.data, [[0.0, 0.0], [0.6, 0.8]])


def test_gradcheck_rejects_bad_step(x):
    with pytest.raises(GradCheckError):
        finite_diff_check(lambda t: ops.sum_all(t), x, h=1e-2)


def test_linear_state_dict_round_trip():
    rng = np.random.default_rng(0)
    layer = Linear(3, 2, rng)
    assert [name for name, _ in layer.named_parameters()] == ["weight", "bias"]
    assert layer.num_parameters() == 3 * 2 + 2

    other = Linear(3, 2, np.random.default_rng(1))
    other.load_state_dict(layer.state_dict())
    np.testing.assert_array_equal(other.weight.data, layer.weight.data)

    with pytest.raises(ShapeError):
        other.load_state_dict({"weight": np.zeros((2, 2)), "bias": np.zeros(2)})
    with pytest.raises(KeyError):
        other.load_state_dict({"weight": np.zeros((3, 2))})


def test_softmax_is_shift_invariant():
    x = np.random.default_rng(5).normal(size=(3, 4))
    np.testing.assert_allclose(ops.softmax(Tensor(x + 7.5)).data, ops.softmax(Tensor(x)).data, atol=1e-12)
