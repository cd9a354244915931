import numpy as np
import pytest
from scipy import sparse

from mwdk.aggregate import build_operator, wl_iterate, wl_step
from mwdk.errors import ParameterError

from helpers import make_graph, random_graph
from oracles import wl_reference, wl_reference_step


# ============================================================
# Operator construction
# ============================================================

def test_wl_operator_on_path(path5):
    op = np.asarray(build_operator(path5, "wl").todense())
    assert np.array_equal(op[1], [0.5, 0.0, 0.5, 0.0, 0.0])
    assert np.allclose(op.sum(axis=1), 1.0)


def test_operator_on_regular_graph():
    # 4-cycle: degree 2 everywhere
    g = make_graph([(0, 1), (1, 2), (2, 3), (3, 0)], np.eye(4))
    for kind in ("wl", "rw", "sym"):
        op = np.asarray(build_operator(g, kind).todense())
        assert np.allclose(op.sum(axis=1), 1.0)
        assert np.allclose(op[op > 0], 0.5)


def test_sym_operator_matches_dense_formula():
    rng = np.random.default_rng(0)
    g = random_graph(rng, 9, p=0.45)
    A = np.asarray(g.adjacency.todense())
    deg = A.sum(axis=1)
    inv_root = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    want = inv_root[:, None] * A * inv_root[None, :]
    got = np.asarray(build_operator(g, "sym").todense())
    iso = deg == 0
    want[iso, iso] = 1.0
    assert np.allclose(got, want, atol=1e-14)


def test_rw_is_wl_transposed():
    rng = np.random.default_rng(1)
    g = random_graph(rng, 12, p=0.3)
    rw = np.asarray(build_operator(g, "rw").todense())
    wl = np.asarray(build_operator(g, "wl").todense())
    assert np.allclose(rw, wl.T, atol=1e-15)


def test_isolated_node_gets_identity_row(triangle_plus_isolate):
    for kind in ("wl", "rw", "sym"):
        op = np.asarray(build_operator(triangle_plus_isolate, kind).todense())
        assert op[3, 3] == 1.0
        assert op[3, :3].sum() == 0.0


def test_operator_rejects_unknown_kind(path5):
    with pytest.raises(ParameterError):
        build_operator(path5, "left")


# ============================================================
# Single step
# ============================================================

def test_step_two_connected_nodes():
    a, b = np.array([2.0, 0.0]), np.array([4.0, 6.0])
    g = make_graph([(0, 1)], [a, b])
    op = build_operator(g, "wl")
    out = wl_step(np.vstack([a, b]), op)
    assert np.allclose(out[0], (a + b) / 2)
    assert np.allclose(out[1], (a + b) / 2)


def test_step_keeps_isolated_node_fixed(triangle_plus_isolate):
    g = triangle_plus_isolate
    op = build_operator(g, "wl")
    for agg in ("avg", "min", "max", "all"):
        out = np.asarray(wl_step(g.features, op, agg))
        assert np.allclose(out[3].reshape(-1, 2), g.features[3])


def test_step_avg_equals_half_identity_plus_operator(path5):
    X = np.random.default_rng(2).normal(size=(5, 3))
    A = np.asarray(path5.adjacency.todense())
    D_inv = np.diag(1.0 / A.sum(axis=1))
    want = 0.5 * (np.eye(5) + D_inv @ A) @ X
    got = np.asarray(wl_step(X, build_operator(path5, "wl")))
    assert np.allclose(got, want, atol=1e-14)


@pytest.mark.parametrize("agg", ["min", "max", "avg", "all"])
@pytest.mark.parametrize("norm", ["wl", "rw", "sym"])
def test_step_matches_neighbor_loop_oracle(agg, norm):
    rng = np.random.default_rng(3)
    for trial in range(5):
        g = random_graph(rng, 10, p=0.35, d=3)
        op = build_operator(g, norm)
        got = np.asarray(wl_step(g.features, op, agg))
        want = wl_reference_step(g.features, g.adjacency.todense(), norm, agg)
        assert np.allclose(got, want, atol=1e-12)


def test_min_max_ignore_normalization_weights():
    """The reduction uses raw neighbor rows, so all norms agree."""
    rng = np.random.default_rng(4)
    g = random_graph(rng, 8, p=0.4)
    outs = [np.asarray(wl_step(g.features, build_operator(g, k), "min"))
            for k in ("wl", "rw", "sym")]
    assert np.array_equal(outs[0], outs[1])
    assert np.array_equal(outs[0], outs[2])


def test_all_concatenates_min_max_avg(path5):
    X = np.random.default_rng(5).normal(size=(5, 2))
    op = build_operator(path5, "wl")
    got = np.asarray(wl_step(X, op, "all"))
    parts = [np.asarray(wl_step(X, op, a)) for a in ("min", "max", "avg")]
    assert np.array_equal(got, np.hstack(parts))


def test_step_sparse_input_matches_dense(path5):
    X = np.abs(np.random.default_rng(6).normal(size=(5, 4)))
    X[X < 0.7] = 0.0
    op = build_operator(path5, "wl")
    for agg in ("avg", "min", "max", "all"):
        dense = np.asarray(wl_step(X, op, agg))
        sparse_out = wl_step(sparse.csr_matrix(X), op, agg)
        if sparse.issparse(sparse_out):
            sparse_out = np.asarray(sparse_out.todense())
        assert np.allclose(dense, np.asarray(sparse_out), atol=1e-14)


def test_step_avg_stays_in_convex_hull():
    rng = np.random.default_rng(7)
    g = random_graph(rng, 14, p=0.3, d=5)
    out = np.asarray(wl_step(g.features, build_operator(g, "wl")))
    lo = g.features.min(axis=0) - 1e-12
    hi = g.features.max(axis=0) + 1e-12
    assert (out >= lo).all() and (out <= hi).all()


def test_step_rejects_row_mismatch(path5):
    op = build_operator(path5, "wl")
    with pytest.raises(ParameterError, match="rows"):
        wl_step(np.zeros((4, 2)), op)
    with pytest.raises(ParameterError):
        wl_step(np.zeros((5, 2)), op, "median")


# ============================================================
# Iteration
# ============================================================

def test_iterate_zero_steps_returns_input(path5):
    X = np.random.default_rng(8).normal(size=(5, 2))
    op = build_operator(path5, "wl")
    assert np.array_equal(wl_iterate(X, op, 0), X)


def test_iterate_composes_steps():
    g = make_graph([(0, 1), (0, 2), (1, 2)], [[1.0], [2.0], [4.0]])
    op = build_operator(g, "wl")
    once = wl_step(np.asarray(g.features), op)
    twice = wl_step(once, op)
    assert np.allclose(np.asarray(wl_iterate(g.features, op, 2)), twice)


def test_iterate_concat_widens_columns(path5):
    X = np.random.default_rng(9).normal(size=(5, 3))
    op = build_operator(path5, "wl")
    out = np.asarray(wl_iterate(X, op, 2, concat=True))
    assert out.shape == (5, 9)
    assert np.array_equal(out[:, :3], X)


def test_iterate_rejects_negative_h(path5):
    with pytest.raises(ParameterError):
        wl_iterate(np.zeros((5, 2)), build_operator(path5, "wl"), -1)


@pytest.mark.parametrize("norm", ["wl", "rw", "sym"])
def test_iterate_matches_reference_to_depth_three(norm):
    rng = np.random.default_rng(10)
    for trial in range(4):
        g = random_graph(rng, 9, p=0.4, d=2)
        got = np.asarray(wl_iterate(g.features, build_operator(g, norm), 3))
        want = wl_reference(g.features, g.adjacency.todense(), norm, "avg", 3)
        assert np.allclose(got, want, atol=1e-12)
