import numpy as np
import pytest
from scipy import sparse

from mwdk.errors import DataError, ParameterError
from mwdk.graph import (AttributedGraph, NoiseSpec, SyntheticSpec,
                        expected_edge_count, generate_synthetic, load_graph,
                        perturb_edges, save_graph)

from helpers import make_graph


# ============================================================
# Spec validation
# ============================================================

def test_spec_defaults_validate():
    SyntheticSpec().validate()


@pytest.mark.parametrize("kwargs", [
    dict(nodes_per_cluster=0),
    dict(dims=0),
    dict(alpha=(0.0, 0.5)),
    dict(alpha=(1.0, 0.5)),
    dict(beta=-0.1),
    dict(beta=0.006),           # beta must stay below min(alpha)
    dict(sigma=(0.0, 1.0)),
])
def test_spec_rejects_bad_parameters(kwargs):
    with pytest.raises(ParameterError):
        SyntheticSpec(**kwargs).validate()


def test_spec_allows_zero_beta():
    SyntheticSpec(beta=0.0).validate()


def test_noise_spec_rejects_negative_counts():
    with pytest.raises(ParameterError):
        NoiseSpec(interclass_add=-1).validate()
    with pytest.raises(ParameterError):
        NoiseSpec(intraclass_remove=-3).validate()


# ============================================================
# Synthetic generation
# ============================================================

def small_spec(**kwargs):
    base = dict(mu=(0.0, 5.0), sigma=(10.0, 10.0), alpha=(0.05, 0.05),
                beta=0.01, nodes_per_cluster=120, dims=8, seed=42)
    base.update(kwargs)
    return SyntheticSpec(**base)


def test_generate_basic_shape_and_labels():
    g = generate_synthetic(small_spec())
    assert g.n == 240
    assert g.features.shape == (240, 8)
    assert np.array_equal(g.labels, np.repeat([0, 1], 120))


def test_generate_adjacency_is_simple_and_symmetric():
    g = generate_synthetic(small_spec())
    A = g.adjacency
    assert (A != A.T).nnz == 0
    assert A.diagonal().sum() == 0
    assert set(np.unique(A.data)) == {1.0}


def test_generate_is_deterministic_per_seed():
    a = generate_synthetic(small_spec())
    b = generate_synthetic(small_spec())
    c = generate_synthetic(small_spec(seed=43))
    assert (a.adjacency != b.adjacency).nnz == 0
    assert np.array_equal(a.features, b.features)
    assert (a.adjacency != c.adjacency).nnz > 0
    assert not np.array_equal(a.features, c.features)


def test_generate_edge_count_tracks_expectation():
    """Observed m should sit within 4 binomial standard deviations."""
    spec = small_spec()
    expected = expected_edge_count(spec)
    # every pair is an independent Bernoulli with p <= 0.05
    std = np.sqrt(expected)
    counts = [generate_synthetic(small_spec(seed=s)).m for s in range(5)]
    for m in counts:
        assert abs(m - expected) < 4 * std


def test_expected_edge_count_formula():
    spec = SyntheticSpec(alpha=(0.2, 0.1), beta=0.05, nodes_per_cluster=4)
    # 6 within-pairs per cluster, 16 cross pairs
    assert expected_edge_count(spec) == pytest.approx(6 * 0.2 + 6 * 0.1 + 16 * 0.05)


def test_generate_feature_moments():
    g = generate_synthetic(small_spec(sigma=(10.0, 2.0)))
    first, second = g.features[:120], g.features[120:]
    assert abs(first.mean() - 0.0) < 1.0
    assert abs(second.mean() - 5.0) < 1.0
    assert abs(first.std() - 10.0) < 1.0
    assert abs(second.std() - 2.0) < 0.5


def test_generate_zero_beta_has_no_cross_edges():
    g = generate_synthetic(small_spec(beta=0.0))
    coo = sparse.triu(g.adjacency, k=1).tocoo()
    assert (g.labels[coo.row] != g.labels[coo.col]).sum() == 0


def test_generate_unequal_alpha_halves_mean_degree():
    spec = small_spec(alpha=(0.08, 0.04), beta=0.0, nodes_per_cluster=300)
    g = generate_synthetic(spec)
    deg = g.degrees()
    ratio = deg[:300].mean() / deg[300:].mean()
    assert 1.6 < ratio < 2.4


# ============================================================
# File round-trips
# ============================================================

def test_save_load_roundtrip(tmp_path, bridged_triangles):
    paths = save_graph(bridged_triangles, tmp_path)
    g = load_graph(paths["edges"], paths["features"], paths["labels"])
    assert (g.adjacency != bridged_triangles.adjacency).nnz == 0
    assert np.array_equal(g.features, bridged_triangles.features)
    assert np.array_equal(g.labels, bridged_triangles.labels)


def test_load_three_node_path(tmp_path):
    (tmp_path / "e.txt").write_text("0 1\n1 2\n")
    (tmp_path / "f.csv").write_text("1.0,2.0\n3.0,4.0\n5.0,6.0\n")
    g = load_graph(tmp_path / "e.txt", tmp_path / "f.csv")
    assert g.m == 2
    assert list(g.degrees()) == [1, 2, 1]
    assert g.labels is None


def test_load_drops_self_loops_and_duplicates_with_warning(tmp_path):
    (tmp_path / "e.txt").write_text("0 0\n0 1\n1 0\n")
    (tmp_path / "f.csv").write_text("1.0\n2.0\n")
    with pytest.warns(UserWarning, match="dropped 2"):
        g = load_graph(tmp_path / "e.txt", tmp_path / "f.csv")
    assert g.m == 1


def test_load_skips_blank_lines(tmp_path):
    (tmp_path / "e.txt").write_text("\n0 1\n\n")
    (tmp_path / "f.csv").write_text("1.0\n2.0\n")
    assert load_graph(tmp_path / "e.txt", tmp_path / "f.csv").m == 1


def test_load_rejects_malformed_edge_line(tmp_path):
    (tmp_path / "e.txt").write_text("0 1\n0 1 2\n")
    (tmp_path / "f.csv").write_text("1.0\n2.0\n")
    with pytest.raises(DataError, match="e.txt:2"):
        load_graph(tmp_path / "e.txt", tmp_path / "f.csv")


def test_load_rejects_non_integer_ids(tmp_path):
    (tmp_path / "e.txt").write_text("a b\n")
    (tmp_path / "f.csv").write_text("1.0\n2.0\n")
    with pytest.raises(DataError, match="e.txt:1"):
        load_graph(tmp_path / "e.txt", tmp_path / "f.csv")


def test_load_rejects_out_of_range_ids(tmp_path):
    (tmp_path / "e.txt").write_text("0 5\n")
    (tmp_path / "f.csv").write_text("1.0\n2.0\n")
    with pytest.raises(DataError, match="out of range"):
        load_graph(tmp_path / "e.txt", tmp_path / "f.csv")


def test_load_rejects_label_length_mismatch(tmp_path):
    (tmp_path / "e.txt").write_text("0 1\n")
    (tmp_path / "f.csv").write_text("1.0\n2.0\n")
    (tmp_path / "l.txt").write_text("0\n1\n1\n")
    with pytest.raises(DataError, match="3 labels for 2"):
        load_graph(tmp_path / "e.txt", tmp_path / "f.csv", tmp_path / "l.txt")


def test_load_missing_files_are_data_errors(tmp_path):
    (tmp_path / "f.csv").write_text("1.0\n")
    with pytest.raises(DataError):
        load_graph(tmp_path / "nope.txt", tmp_path / "f.csv")
    with pytest.raises(DataError):
        load_graph(tmp_path / "nope.txt", tmp_path / "nope.csv")


# ============================================================
# Noise perturbation
# ============================================================

def noisy_test_graph():
    return generate_synthetic(small_spec(seed=9))


def test_perturb_zero_is_identity():
    g = noisy_test_graph()
    out = perturb_edges(g, NoiseSpec(0, 0, seed=1))
    assert (out.adjacency != g.adjacency).nnz == 0


def test_perturb_adds_exact_cross_label_edges():
    g = noisy_test_graph()
    out = perturb_edges(g, NoiseSpec(interclass_add=25, seed=3))
    assert out.m == g.m + 25
    new = sparse.triu(out.adjacency - g.adjacency, k=1).tocoo()
    assert new.nnz == 25
    assert (g.labels[new.row] != g.labels[new.col]).all()


def test_perturb_removes_exact_within_label_edges():
    g = noisy_test_graph()
    out = perturb_edges(g, NoiseSpec(intraclass_remove=30, seed=3))
    assert out.m == g.m - 30
    gone = sparse.triu(g.adjacency - out.adjacency, k=1).tocoo()
    assert gone.nnz == 30
    assert (g.labels[gone.row] == g.labels[gone.col]).all()


def test_perturb_can_exhaust_within_label_edges():
    edges = [(0, 1), (2, 3)]
    g = make_graph(edges, np.eye(4), labels=[0, 0, 1, 1])
    out = perturb_edges(g, NoiseSpec(intraclass_remove=2, seed=0))
    assert out.m == 0


def test_perturb_is_deterministic():
    g = noisy_test_graph()
    spec = NoiseSpec(interclass_add=10, intraclass_remove=10, seed=7)
    a = perturb_edges(g, spec)
    b = perturb_edges(g, spec)
    assert (a.adjacency != b.adjacency).nnz == 0


def test_perturb_over_request_raises():
    g = noisy_test_graph()
    with pytest.raises(ParameterError, match="cannot remove"):
        perturb_edges(g, NoiseSpec(intraclass_remove=10 ** 9))
    with pytest.raises(ParameterError, match="cannot add"):
        perturb_edges(g, NoiseSpec(interclass_add=10 ** 9))


def test_perturb_requires_labels():
    g = make_graph([(0, 1)], np.eye(2))
    with pytest.raises(ParameterError, match="labels"):
        perturb_edges(g, NoiseSpec(interclass_add=1))


def test_graph_properties(bridged_triangles):
    g = bridged_triangles
    assert g.n == 6
    assert g.m == 7
    assert g.degrees().sum() == 14
