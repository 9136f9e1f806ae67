import numpy as np
import pytest

from src.autodiff import Tensor, finite_diff_check, ops
from src.autodiff.tensor import ShapeError
from src.model.lgpe import (LanguageGuidedPrototypes, TextProjection, fuse_prototypes, fusion_weights,
                            project_text)
from src.model.text_embeddings import (EmbeddingTableError, TextEmbeddingTable, UnknownClassError, load_table,
                                       save_table, synth_embedding)


def test_fusion_weights_schedule():
    assert fusion_weights(0.0) == pytest.approx((0.0, 0.0, 0.0, 0.6))
    l1, l2, l3, l4 = fusion_weights(2.0)
    assert l4 == pytest.approx(0.2207, abs=1e-4)
    assert l1 == pytest.approx(0.6321, abs=1e-4)
    assert l2 == pytest.approx(0.5 * 0.6321, abs=1e-4)
    with pytest.raises(ValueError):
        fusion_weights(-0.1)


def test_fuse_prototypes_affine_combination():
    rng = np.random.default_rng(0)
    parts = [Tensor(rng.normal(size=(3, 4))) for _ in range(4)]
    fused = fuse_prototypes(*parts, t=2.0)
    weights = fusion_weights(2.0)
    expected = sum(w * p.data for w, p in zip(weights, parts))
    np.testing.assert_allclose(fused.data, expected)


def test_fuse_prototypes_zero_shot_returns_text():
    rng = np.random.default_rng(1)
    parts = [Tensor(rng.normal(size=(3, 4))) for _ in range(4)]
    assert fuse_prototypes(*parts, t=0.0, zero_shot=True) is parts[3]
    with pytest.raises(ShapeError):
        fuse_prototypes(parts[0], parts[1], parts[2], Tensor(np.zeros((2, 4))), t=0.0)


def test_text_projection_shapes():
    proj = TextProjection(6, 4, np.random.default_rng(0))
    assert project_text(np.ones(6), proj).shape == (1, 4)
    assert project_text(np.ones((3, 6)), proj).shape == (3, 4)
    zero = TextProjection(6, 4, np.random.default_rng(0), zero_final=True)
    np.testing.assert_array_equal(project_text(np.ones(6), zero).data, np.zeros((1, 4)))


def test_text_prototypes_put_background_first():
    table = TextEmbeddingTable(dim=6)
    lgpe = LanguageGuidedPrototypes(6, 4, np.random.default_rng(0))
    p_text = lgpe.text_prototypes(["chair", "table"], table)
    assert p_text.shape == (3, 4)
    alone = lgpe.proj(lgpe.background)
    np.testing.assert_allclose(p_text.data[:1], alone.data)
    with pytest.raises(ShapeError):
        lgpe.class_embeddings(["chair"], TextEmbeddingTable(dim=5))


def test_synthetic_embeddings_are_deterministic_unit_vectors():
    a = synth_embedding("Book Case", dim=16, seed=3)
    b = synth_embedding("book_case", dim=16, seed=3)
    np.testing.assert_array_equal(a, b)
    assert np.linalg.norm(a) == pytest.approx(1.0)
    assert not np.allclose(a, synth_embedding("book_case", dim=16, seed=4))


def test_lookup_fallback_and_provenance():
    table = TextEmbeddingTable(dim=4)
    table.add("Chair", np.array([1.0, 0.0, 0.0, 0.0]))
    assert "chair" in table
    np.testing.assert_array_equal(table.lookup("CHAIR"), [1.0, 0.0, 0.0, 0.0])
    table.lookup("lamp")
    assert table.provenance == {"chair": "file", "lamp": "synthetic"}
    strict = TextEmbeddingTable(dim=4, synthetic_fallback=False)
    with pytest.raises(UnknownClassError):
        strict.lookup("lamp")
    with pytest.raises(EmbeddingTableError):
        table.add("sofa", np.ones(3))


def test_table_file_round_trip(tmp_path):
    table = TextEmbeddingTable(dim=3)
    table.add("chair", np.array([0.1, 0.2, 0.3]))
    table.add("table", np.array([-1.0, 0.5, 2.0]))
    path = tmp_path / "emb.ept"
    save_table(table, path)
    loaded = load_table(path, synthetic_fallback=False)
    assert loaded.dim == 3
    assert loaded.names() == ["chair", "table"]
    np.testing.assert_array_equal(loaded.matrix(["table", "chair"]), table.matrix(["table", "chair"]))


@pytest.mark.parametrize("content", ["", "EPT2 3\n", "EPT1 x\n", "EPT1 3\nchair 1 2\n", "EPT1 2\nchair 1 b\n"])
def test_malformed_table_files(tmp_path, content):
    path = tmp_path / "bad.ept"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(EmbeddingTableError):
        load_table(path)


def test_fusion_weights_limit():
    assert fusion_weights(1e6) == (1.0, 0.5, 0.7, 0.0)
    assert fusion_weights(1e6, lambda_star=(0.2, 0.3, 0.4, 0.9)) == (0.2, 0.3, 0.4, 0.0)


def test_fuse_prototypes_is_linear_in_inputs():
    rng = np.random.default_rng(2)
    first = [Tensor(rng.normal(size=(3, 4))) for _ in range(4)]
    second = [Tensor(rng.normal(size=(3, 4))) for _ in range(4)]
    summed = [Tensor(a.data + 2.0 * b.data) for a, b in zip(first, second)]
    combined = fuse_prototypes(*first, t=1.5).data + 2.0 * fuse_prototypes(*second, t=1.5).data
    np.testing.assert_allclose(fuse_prototypes(*summed, t=1.5).data, combined, atol=1e-12)


def test_synthetic_embeddings_are_nearly_orthogonal():
    names = ["floor", "chair", "table", "sofa", "bookcase", "board", "window", "door", "column", "beam"]
    vectors = np.stack([synth_embedding(name, dim=512, seed=0) for name in names])
    cosines = vectors @ vectors.T
    off_diagonal = cosines[~np.eye(len(names), dtype=bool)]
    assert np.abs(off_diagonal).max() < 0.25


def test_project_text_gradient_and_consistency():
    rng = np.random.default_rng(3)
    proj = TextProjection(6, 4, rng)
    text = rng.normal(size=(3, 6))
    np.testing.assert_array_equal(project_text(text, proj).data, proj(Tensor(text)).data)
    weights = Tensor(rng.normal(size=(3, 4)))
    assert finite_diff_check(lambda x: ops.sum_all(ops.mul(proj(x), weights)), Tensor(text)) < 1e-4
