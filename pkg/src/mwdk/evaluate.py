"""Clustering metrics and community-similarity diagnostics.

Handles:
    - ACC (optimal label matching), NMI (arithmetic-mean normalization),
      and ARI (pair-counting with expected-index correction)
    - mean pairwise community similarity and its per-iteration curve,
      including the smoothing rate relative to the h=0 baseline
    - the fraction of node pairs whose similarity clears a threshold,
      which detects over-smoothing when it reaches 1

Metric functions accept any integer label vectors; cluster ids need not be
contiguous.
"""

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy import sparse

from .aggregate import build_operator, wl_step, _to_dense
from .embed import mwdk_levels
from .errors import ParameterError
from .ikernel import ik_fit, ik_gram, ik_transform

# Above this many rows, pair statistics switch from exact enumeration to
# uniform pair sampling with this budget.
_EXACT_PAIR_LIMIT = 2000
_PAIR_SAMPLE_BUDGET = 1_000_000


# ============================================================
# Partition metrics
# ============================================================

def metric_acc(pred, truth):
    """Clustering accuracy under the best one-to-one cluster matching."""
    pred, truth = _check_lengths(pred, truth)
    C = _contingency(truth, pred)
    rows, cols = linear_sum_assignment(C, maximize=True)
    return float(C[rows, cols].sum()) / pred.size


def metric_nmi(pred, truth):
    """Mutual information normalized by the arithmetic mean of the entropies.

    When both partitions are trivial (zero entropy on both sides) the ratio
    is 0/0; it is defined as 1 if the partitions are identical, else 0.
    """
    pred, truth = _check_lengths(pred, truth)
    n = pred.size
    C = _contingency(truth, pred).astype(float)
    a = C.sum(axis=1)
    b = C.sum(axis=0)
    nz = C > 0
    mi = (C[nz] / n * (np.log(n * C[nz]) - np.log(np.outer(a, b)[nz]))).sum()
    h_truth = _entropy(a, n)
    h_pred = _entropy(b, n)
    denom = 0.5 * (h_truth + h_pred)
    if denom == 0.0:
        return 1.0 if _same_partition(pred, truth) else 0.0
    return float(min(max(mi, 0.0) / denom, 1.0))


def metric_ari(pred, truth):
    """Adjusted Rand index via pair counting."""
    pred, truth = _check_lengths(pred, truth)
    n = pred.size
    C = _contingency(truth, pred)
    sum_cells = _pairs(C).sum()
    sum_a = _pairs(C.sum(axis=1)).sum()
    sum_b = _pairs(C.sum(axis=0)).sum()
    total = _pairs(np.array([n]))[0]
    expected = sum_a * sum_b / total if total else 0.0
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return float((sum_cells - expected) / (max_index - expected))


@dataclass
class MetricReport:
    """Per-repetition metric values; the aggregate is their arithmetic mean."""

    acc_runs: list = field(default_factory=list)
    nmi_runs: list = field(default_factory=list)
    ari_runs: list = field(default_factory=list)
    seeds: list = field(default_factory=list)

    def add(self, seed, acc, nmi, ari):
        self.seeds.append(seed)
        self.acc_runs.append(acc)
        self.nmi_runs.append(nmi)
        self.ari_runs.append(ari)

    @property
    def acc(self):
        return float(np.mean(self.acc_runs))

    @property
    def nmi(self):
        return float(np.mean(self.nmi_runs))

    @property
    def ari(self):
        return float(np.mean(self.ari_runs))


# ============================================================
# Community similarity
# ============================================================

def community_similarity(E, members_a, members_b, kernel):
    """Mean pairwise kernel value over the cross product of two node sets.

    Within-community similarity is the same call with both sets equal, in
    which case self-pairs are included by design.
    """
    members_a = np.asarray(members_a, dtype=int)
    members_b = np.asarray(members_b, dtype=int)
    if members_a.size == 0 or members_b.size == 0:
        raise ParameterError("community member sets must be nonempty")
    block = kernel(E[members_a], E[members_b])
    return float(np.mean(block))


def linear_gram(a, b):
    """Plain inner-product kernel block."""
    if sparse.issparse(a) or sparse.issparse(b):
        return np.asarray((sparse.csr_matrix(a) @ sparse.csr_matrix(b).T).todense())
    return np.asarray(a, dtype=float) @ np.asarray(b, dtype=float).T


@dataclass
class SimilarityCurve:
    """Per-iteration community similarities and smoothing rates.

    r_between[h] = (s_between[h] - s_between[0]) / h for h >= 1; the h=0
    entry is 0 by convention (no iterations, no rate).
    """

    h_values: list
    s_within_1: list
    s_within_2: list
    s_between: list

    @property
    def r_between(self):
        base = self.s_between[0]
        return [0.0 if h == 0 else (s - base) / h
                for h, s in zip(self.h_values, self.s_between)]


def smoothing_curve(g, cfg, h_max):
    """Community-similarity curve over h = 0..h_max for one embedding method.

    The two communities come from g.labels, which must contain exactly two
    distinct values. The kernel is the plain inner product on max-norm
    rescaled embeddings for the wl method, and the tessellation-agreement
    fraction (inner product / t) for wdk and mwdk.
    """
    cfg.validate()
    if g.labels is None:
        raise ParameterError("smoothing curves require ground-truth labels")
    values = np.unique(g.labels)
    if values.size != 2:
        raise ParameterError(
            f"smoothing curves are defined for 2 communities, found {values.size}"
        )
    if h_max < 0:
        raise ParameterError("h_max must be nonnegative")
    ca = np.flatnonzero(g.labels == values[0])
    cb = np.flatnonzero(g.labels == values[1])

    curve = SimilarityCurve([], [], [], [])
    for h, E in enumerate(_embedding_sequence(g, cfg, h_max)):
        if cfg.method == "wl":
            E = _to_dense(E)
            top = np.linalg.norm(E, axis=1).max()
            if top > 0:
                E = E / top
            kernel = linear_gram
        else:
            kernel = lambda a, b: ik_gram(a, b, cfg.ik.t)
        curve.h_values.append(h)
        curve.s_within_1.append(community_similarity(E, ca, ca, kernel))
        curve.s_within_2.append(community_similarity(E, cb, cb, kernel))
        curve.s_between.append(community_similarity(E, ca, cb, kernel))
    return curve


def _embedding_sequence(g, cfg, h_max):
    """Yield the method's embedding at h = 0, 1, .., h_max incrementally."""
    if cfg.method == "mwdk":
        for _, aggregated in mwdk_levels(g, cfg, h_max + 1):
            yield aggregated
        return
    if cfg.method == "wl":
        cur = np.asarray(g.features, dtype=float)
    else:
        model = ik_fit(np.asarray(g.features, dtype=float), cfg.ik)
        cur = ik_transform(model, np.asarray(g.features, dtype=float))
    op = build_operator(g, cfg.norm)
    yield cur
    for _ in range(h_max):
        cur = wl_step(cur, op, cfg.agg)
        yield cur


def write_curve_csv(curve, path):
    """Serialize a similarity curve; a curve that never iterates (h_max=0)
    carries no rate information and writes just the header."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["h", "s_c1", "s_c2", "s_between", "r_between"])
        if len(curve.h_values) <= 1:
            return
        rates = curve.r_between
        for i, h in enumerate(curve.h_values):
            writer.writerow([
                h,
                repr(curve.s_within_1[i]),
                repr(curve.s_within_2[i]),
                repr(curve.s_between[i]),
                repr(rates[i]),
            ])


# ============================================================
# Over-smoothing detection
# ============================================================

def mu_similar_fraction(E, mu, kernel, seed=0):
    """Fraction of unordered node pairs with kernel similarity >= mu.

    Exact enumeration up to 2000 rows; uniform sampling of 10^6 pairs
    beyond. A fraction of 1.0 means every pair clears the threshold, the
    over-smoothing condition at level mu.
    """
    if not 0.0 < mu <= 1.0:
        raise ParameterError("mu must lie in (0, 1]")
    n = E.shape[0]
    if n < 2:
        raise ParameterError("need at least 2 rows")
    if n <= _EXACT_PAIR_LIMIT:
        hits = 0
        for start in range(0, n, 256):
            stop = min(start + 256, n)
            block = np.asarray(kernel(E[start:stop], E))
            for i in range(start, stop):
                hits += int((block[i - start, i + 1:] >= mu).sum())
        return hits / (n * (n - 1) / 2)
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    while done < _PAIR_SAMPLE_BUDGET:
        # only the diagonal of each kernel block is a sampled pair, so keep
        # the blocks small; the off-diagonal work is pure overhead
        want = min(64, _PAIR_SAMPLE_BUDGET - done)
        i = rng.integers(0, n, size=want)
        j = rng.integers(0, n, size=want)
        ok = i != j
        i, j = i[ok], j[ok]
        vals = np.diagonal(np.asarray(kernel(E[i], E[j])))
        hits += int((vals >= mu).sum())
        done += i.size
    return hits / done


# ============================================================
# Internals
# ============================================================

def _check_lengths(pred, truth):
    pred = np.asarray(pred, dtype=int).ravel()
    truth = np.asarray(truth, dtype=int).ravel()
    if pred.size != truth.size:
        raise ParameterError(
            f"prediction length {pred.size} does not match truth length {truth.size}"
        )
    if pred.size == 0:
        raise ParameterError("empty label vectors")
    return pred, truth


def _contingency(truth, pred):
    _, ti = np.unique(truth, return_inverse=True)
    _, pi = np.unique(pred, return_inverse=True)
    kt, kp = ti.max() + 1, pi.max() + 1
    counts = np.bincount(ti * kp + pi, minlength=kt * kp)
    return counts.reshape(kt, kp)


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def _same_partition(a, b):
    return bool(np.array_equal(_first_occurrence_canon(a), _first_occurrence_canon(b)))


def _first_occurrence_canon(x):
    """Relabel by order of first appearance, making label values irrelevant."""
    seen = {}
    return np.array([seen.setdefault(v, len(seen)) for v in x.tolist()])


def _pairs(x):
    x = np.asarray(x, dtype=float)
    return x * (x - 1) / 2.0
