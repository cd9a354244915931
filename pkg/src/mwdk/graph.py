"""Graph representation, dataset ingestion, and benchmark generation.

Handles:
    - the AttributedGraph container (CSR adjacency + dense features + labels)
    - loading edge/feature/label files from disk and writing them back
    - two-cluster Gaussian synthetic benchmarks (per-pair Bernoulli edges)
    - noise-edge perturbation (cross-label additions, within-label removals)

Adjacency matrices are symmetric, unweighted, and never store self-loops.
"""

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import DataError, ParameterError


# ============================================================
# Containers
# ============================================================

@dataclass
class AttributedGraph:
    """Undirected attributed graph with optional ground-truth communities."""

    adjacency: sparse.csr_matrix      # n x n, symmetric, binary, zero diagonal
    features: np.ndarray              # n x d, real-valued
    labels: np.ndarray | None = None  # length n, community ids, or None

    @property
    def n(self):
        return self.adjacency.shape[0]

    @property
    def m(self):
        """Number of undirected edges."""
        return self.adjacency.nnz // 2

    def degrees(self):
        return np.asarray(self.adjacency.sum(axis=1)).ravel()


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for the two-cluster Gaussian benchmark generator.

    Cluster i draws every feature dimension i.i.d. from N(mu[i], sigma[i]).
    Each within-cluster pair is connected with probability alpha[i], each
    cross-cluster pair with probability beta.
    """

    mu: tuple = (0.0, 5.0)
    sigma: tuple = (10.0, 10.0)
    alpha: tuple = (6e-3, 6e-3)
    beta: float = 6e-4
    nodes_per_cluster: int = 1000
    dims: int = 100
    seed: int = 0

    def validate(self):
        if self.nodes_per_cluster <= 0:
            raise ParameterError("nodes_per_cluster must be positive")
        if self.dims <= 0:
            raise ParameterError("dims must be positive")
        for a in self.alpha:
            if not 0.0 < a < 1.0:
                raise ParameterError("alpha values must lie in (0, 1)")
        # beta=0 is allowed: it just never draws a cross edge
        if not 0.0 <= self.beta < min(self.alpha):
            raise ParameterError("beta must satisfy 0 <= beta < min(alpha)")
        for s in self.sigma:
            if s <= 0:
                raise ParameterError("sigma values must be positive")


@dataclass(frozen=True)
class NoiseSpec:
    """Edge-noise protocol: add cross-label edges, remove within-label edges."""

    interclass_add: int = 0
    intraclass_remove: int = 0
    seed: int = 0

    def validate(self):
        if self.interclass_add < 0 or self.intraclass_remove < 0:
            raise ParameterError("noise counts must be nonnegative")


# ============================================================
# File input / output
# ============================================================

def load_graph(edge_file, feature_file, label_file=None):
    """Read a graph from an edge list, a feature CSV, and optional labels.

    Args:
        edge_file: path to a text file with one "u v" pair per line (0-based).
        feature_file: path to a CSV with n rows and d columns.
        label_file: optional path with one integer per line, length n.

    Returns:
        AttributedGraph. Duplicate edges and self-loops are dropped; a single
        warning reports how many lines were discarded.

    Raises:
        DataError: unreadable files, node ids out of range (the offending
            line is named), or row-count mismatches between files.
    """
    feature_file = Path(feature_file)
    try:
        features = np.loadtxt(feature_file, delimiter=",", dtype=float, ndmin=2)
    except OSError as exc:
        raise DataError(f"cannot read feature file: {exc}") from exc
    except ValueError as exc:
        raise DataError(f"{feature_file}: malformed feature CSV ({exc})") from exc
    if features.size == 0:
        raise DataError(f"{feature_file}: no feature rows")
    n = features.shape[0]

    edge_file = Path(edge_file)
    try:
        lines = edge_file.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read edge file: {exc}") from exc

    seen = set()
    dropped = 0
    us, vs = [], []
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise DataError(f"{edge_file}:{lineno}: expected two node ids, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise DataError(f"{edge_file}:{lineno}: non-integer node id in {line!r}")
        if not (0 <= u < n and 0 <= v < n):
            raise DataError(
                f"{edge_file}:{lineno}: node id out of range [0, {n}) in {line!r}"
            )
        if u == v:
            dropped += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            dropped += 1
            continue
        seen.add(key)
        us.append(key[0])
        vs.append(key[1])
    if dropped:
        warnings.warn(f"{edge_file}: dropped {dropped} self-loop or duplicate edge lines")

    labels = None
    if label_file is not None:
        label_file = Path(label_file)
        try:
            labels = np.loadtxt(label_file, dtype=int, ndmin=1)
        except OSError as exc:
            raise DataError(f"cannot read label file: {exc}") from exc
        except ValueError as exc:
            raise DataError(f"{label_file}: malformed label file ({exc})") from exc
        if labels.shape[0] != n:
            raise DataError(
                f"{label_file}: {labels.shape[0]} labels for {n} feature rows"
            )

    adjacency = _edges_to_csr(np.asarray(us, dtype=int), np.asarray(vs, dtype=int), n)
    return AttributedGraph(adjacency=adjacency, features=features, labels=labels)


def save_graph(g, out_dir, prefix=""):
    """Write edges.txt, features.csv, and labels.txt (if present) to out_dir.

    Floats are written with enough digits to round-trip exactly. Returns the
    mapping of roles to file paths.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "edges": out_dir / f"{prefix}edges.txt",
        "features": out_dir / f"{prefix}features.csv",
    }
    coo = sparse.triu(g.adjacency, k=1).tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(paths["edges"], "w", encoding="utf-8") as fh:
        for u, v in zip(coo.row[order], coo.col[order]):
            fh.write(f"{u} {v}\n")
    np.savetxt(paths["features"], g.features, delimiter=",", fmt="%.17g")
    if g.labels is not None:
        paths["labels"] = out_dir / f"{prefix}labels.txt"
        np.savetxt(paths["labels"], g.labels, fmt="%d")
    return paths


def _edges_to_csr(us, vs, n):
    """Symmetric binary CSR from unique undirected pairs."""
    row = np.concatenate([us, vs])
    col = np.concatenate([vs, us])
    data = np.ones(row.shape[0])
    return sparse.csr_matrix((data, (row, col)), shape=(n, n))


# ============================================================
# Synthetic benchmarks
# ============================================================

def generate_synthetic(spec):
    """Generate a two-cluster Gaussian benchmark graph.

    Features: cluster i draws nodes_per_cluster points with every dimension
    i.i.d. N(mu[i], sigma[i]). Edges: one Bernoulli draw per node pair, with
    probability alpha[i] within cluster i and beta across clusters. The RNG
    stream is fixed by spec.seed, so equal specs generate identical graphs.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    npc = spec.nodes_per_cluster
    n = 2 * npc

    features = np.empty((n, spec.dims))
    features[:npc] = rng.normal(spec.mu[0], spec.sigma[0], size=(npc, spec.dims))
    features[npc:] = rng.normal(spec.mu[1], spec.sigma[1], size=(npc, spec.dims))
    labels = np.repeat([0, 1], npc)

    # Row-by-row upper-triangle scan keeps the draw order deterministic and
    # the memory footprint at O(n) per row.
    us, vs = [], []
    probs = np.empty(n)
    for i in range(n - 1):
        tail = probs[: n - i - 1]
        if i < npc:
            intra = npc - i - 1
            tail[:intra] = spec.alpha[0]
            tail[intra:] = spec.beta
        else:
            tail[:] = spec.alpha[1]
        hits = np.nonzero(rng.random(n - i - 1) < tail)[0]
        if hits.size:
            us.append(np.full(hits.size, i))
            vs.append(hits + i + 1)
    us = np.concatenate(us) if us else np.empty(0, dtype=int)
    vs = np.concatenate(vs) if vs else np.empty(0, dtype=int)
    adjacency = _edges_to_csr(us, vs, n)
    return AttributedGraph(adjacency=adjacency, features=features, labels=labels)


def expected_edge_count(spec):
    """Analytic expectation of the undirected edge count under a spec."""
    npc = spec.nodes_per_cluster
    pairs_within = npc * (npc - 1) / 2
    return pairs_within * (spec.alpha[0] + spec.alpha[1]) + npc * npc * spec.beta


# ============================================================
# Noise-edge perturbation
# ============================================================

def perturb_edges(g, spec):
    """Return a copy of g with noise edges applied per spec.

    Adds exactly spec.interclass_add edges drawn uniformly among absent
    cross-label pairs, and removes exactly spec.intraclass_remove edges drawn
    uniformly among present same-label edges. Symmetry is preserved.

    Raises:
        ParameterError: no labels, more removals than available within-label
            edges, or more additions than absent cross-label pairs.
    """
    spec.validate()
    if g.labels is None:
        raise ParameterError("perturb_edges requires ground-truth labels")
    rng = np.random.default_rng(spec.seed)
    n = g.n
    labels = g.labels

    coo = sparse.triu(g.adjacency, k=1).tocoo()
    intra_mask = labels[coo.row] == labels[coo.col]
    intra_edges = np.flatnonzero(intra_mask)
    if spec.intraclass_remove > intra_edges.size:
        raise ParameterError(
            f"cannot remove {spec.intraclass_remove} within-label edges, "
            f"only {intra_edges.size} exist"
        )

    keep = np.ones(coo.nnz, dtype=bool)
    if spec.intraclass_remove:
        removed = rng.choice(intra_edges, size=spec.intraclass_remove, replace=False)
        keep[removed] = False

    added = _sample_absent_cross_pairs(g, rng, spec.interclass_add)

    us = np.concatenate([coo.row[keep], added[:, 0]])
    vs = np.concatenate([coo.col[keep], added[:, 1]])
    adjacency = _edges_to_csr(us.astype(int), vs.astype(int), n)
    return AttributedGraph(adjacency=adjacency, features=g.features, labels=labels)


def _sample_absent_cross_pairs(g, rng, count):
    """Uniform sample of `count` absent cross-label pairs, as (u, v) rows with u < v."""
    if count == 0:
        return np.empty((0, 2), dtype=int)
    n = g.n
    labels = g.labels
    counts = np.unique(labels, return_counts=True)[1]
    cross_total = (n * n - int((counts ** 2).sum())) // 2
    coo = sparse.triu(g.adjacency, k=1).tocoo()
    present_cross = int((labels[coo.row] != labels[coo.col]).sum())
    available = cross_total - present_cross
    if count > available:
        raise ParameterError(
            f"cannot add {count} cross-label edges, only {available} pairs are absent"
        )

    present = set(zip(coo.row.tolist(), coo.col.tolist()))
    chosen = set()
    # Rejection sampling stays cheap while the pool is much larger than the
    # request; guard against pathological saturation with a round cap.
    for _ in range(200):
        if len(chosen) >= count:
            break
        batch = max(1024, 2 * (count - len(chosen)))
        u = rng.integers(0, n, size=batch)
        v = rng.integers(0, n, size=batch)
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        ok = (lo != hi) & (labels[lo] != labels[hi])
        for a, b in zip(lo[ok].tolist(), hi[ok].tolist()):
            if (a, b) in present or (a, b) in chosen:
                continue
            chosen.add((a, b))
            if len(chosen) >= count:
                break
    else:
        raise ParameterError(
            "cross-label pair pool too saturated for rejection sampling"
        )
    return np.array(sorted(chosen), dtype=int)
