"""Isolation kernel via random Voronoi tessellations, plus a Gaussian kernel.

The isolation kernel is data dependent: fitting draws t independent
reference sets of psi points each (uniform, without replacement) from the
data. The feature map sends a point to a sparse binary vector with one 1
per tessellation, at the column of its nearest reference point. Similarity
between two points is the fraction of tessellations that place them in the
same Voronoi cell.

The same construction is reused on already-embedded sparse rows, which is
what the multi-level embedding does between its levels.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import ParameterError

# Rows of the nearest-reference distance matrix are processed in batches of
# this many queries to bound peak memory at psi*t reference columns.
_BATCH_ROWS = 2048


@dataclass(frozen=True)
class IKConfig:
    psi: int = 64   # reference points per tessellation
    t: int = 100    # number of tessellations
    seed: int = 0

    def validate(self):
        if self.psi < 1:
            raise ParameterError("psi must be at least 1")
        if self.t < 1:
            raise ParameterError("t must be at least 1")


@dataclass
class IKModel:
    """Fitted tessellations: reference rows stacked as one (t*psi, dim) matrix."""

    config: IKConfig
    ref_indices: np.ndarray   # (t, psi) row indices into the fitting data
    references: object        # (t*psi, dim) ndarray or CSR, matching the fit data
    ref_sq_norms: np.ndarray  # (t*psi,) squared norms of the reference rows

    @property
    def dim(self):
        return self.references.shape[1]

    @property
    def out_dim(self):
        return self.config.t * self.config.psi


def ik_fit(data, cfg):
    """Draw t reference sets of psi rows each from `data`.

    Sampling is uniform without replacement within each tessellation and
    independent across tessellations; cfg.seed fixes the draw.

    Raises:
        ParameterError: fewer data rows than psi.
    """
    cfg.validate()
    n = data.shape[0]
    if n < cfg.psi:
        raise ParameterError(f"psi={cfg.psi} exceeds the {n} available rows")
    rng = np.random.default_rng(cfg.seed)
    ref_indices = np.empty((cfg.t, cfg.psi), dtype=int)
    for i in range(cfg.t):
        ref_indices[i] = rng.choice(n, size=cfg.psi, replace=False)
    references = data[ref_indices.ravel()]
    if sparse.issparse(references):
        references = references.tocsr()
        sq = np.asarray(references.multiply(references).sum(axis=1)).ravel()
    else:
        references = np.ascontiguousarray(references, dtype=float)
        sq = np.einsum("ij,ij->i", references, references)
    return IKModel(config=cfg, ref_indices=ref_indices, references=references,
                   ref_sq_norms=sq)


def ik_transform(model, data):
    """Map rows of `data` to sparse binary tessellation-cell indicators.

    Each output row has exactly model.config.t ones, one per tessellation,
    at the column of the Euclidean-nearest reference point. Ties break
    toward the lowest reference index.

    Raises:
        ParameterError: data dimensionality differs from the fitting space.
    """
    if data.shape[1] != model.dim:
        raise ParameterError(
            f"data has {data.shape[1]} columns, model was fitted on {model.dim}"
        )
    t, psi = model.config.t, model.config.psi
    m = data.shape[0]
    winners = np.empty((m, t), dtype=np.int64)
    for start in range(0, m, _BATCH_ROWS):
        stop = min(start + _BATCH_ROWS, m)
        block = data[start:stop]
        gram = _cross_gram(block, model.references)
        # squared distances via the expansion |x|^2 + |r|^2 - 2<x,r>;
        # the |x|^2 term is constant per row and cannot change the argmin
        d2 = model.ref_sq_norms[np.newaxis, :] - 2.0 * gram
        d2 = d2.reshape(stop - start, t, psi)
        winners[start:stop] = np.argmin(d2, axis=2)
        del d2, gram
    cols = (winners + np.arange(t) * psi).ravel()
    indptr = np.arange(0, m * t + 1, t)
    out = sparse.csr_matrix(
        (np.ones(m * t), cols, indptr), shape=(m, t * psi)
    )
    return out


def ik_transform_feature_space(model, data):
    """Nearest-reference assignment for sparse rows of an embedded space.

    Same contract as ik_transform (Euclidean nearest reference, lowest index
    on ties); the Gram blocks are computed with sparse dot products.
    """
    if not sparse.issparse(data):
        raise ParameterError("feature-space transform expects a sparse matrix")
    return ik_transform(model, data.tocsr())


def ik_similarity(fa, fb, t):
    """Fraction of tessellations placing two mapped points in the same cell.

    Accepts sparse or dense binary rows; returns <fa, fb> / t in [0, 1].
    """
    if sparse.issparse(fa):
        dot = (fa.multiply(fb)).sum()
    else:
        dot = float(np.dot(np.ravel(fa), np.ravel(fb)))
    return float(dot) / t


def ik_gram(a, b, t):
    """Pairwise ik_similarity for all row pairs; returns a dense block."""
    if sparse.issparse(a) or sparse.issparse(b):
        g = sparse.csr_matrix(a) @ sparse.csr_matrix(b).T
        g = np.asarray(g.todense())
    else:
        g = np.asarray(a) @ np.asarray(b).T
    return g / t


# ============================================================
# Gaussian base kernel (ablation only)
# ============================================================

def gk_gram(data, bandwidth=None):
    """Gaussian Gram matrix exp(-|x - y|^2 / (2 sigma^2)).

    Args:
        data: dense n x d matrix.
        bandwidth: sigma > 0; None selects the median pairwise distance on a
            subsample of at most 1000 rows.

    Raises:
        ParameterError: non-positive bandwidth (including a degenerate
            median on constant data).
    """
    data = np.asarray(data, dtype=float)
    if bandwidth is None:
        bandwidth = median_bandwidth(data)
    if bandwidth <= 0:
        raise ParameterError("bandwidth must be positive")
    sq = np.einsum("ij,ij->i", data, data)
    d2 = sq[:, np.newaxis] + sq[np.newaxis, :] - 2.0 * (data @ data.T)
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-d2 / (2.0 * bandwidth ** 2))


def median_bandwidth(data, max_rows=1000, seed=0):
    """Median pairwise Euclidean distance on a subsample of the rows."""
    data = np.asarray(data, dtype=float)
    n = data.shape[0]
    if n > max_rows:
        idx = np.random.default_rng(seed).choice(n, size=max_rows, replace=False)
        data = data[idx]
    from scipy.spatial.distance import pdist

    return float(np.median(pdist(data)))


# ============================================================
# Internals
# ============================================================

def _row_sq_norms(x):
    if sparse.issparse(x):
        return np.asarray(x.multiply(x).sum(axis=1)).ravel()
    return np.einsum("ij,ij->i", np.asarray(x, dtype=float), np.asarray(x, dtype=float))


def _cross_gram(block, references):
    """Dense inner-product block between query rows and all reference rows."""
    if sparse.issparse(block) and sparse.issparse(references):
        return np.asarray((block @ references.T).todense())
    if sparse.issparse(block):
        return block @ np.asarray(references, dtype=float).T
    if sparse.issparse(references):
        return np.asarray((references @ np.asarray(block, dtype=float).T).T)
    return np.asarray(block, dtype=float) @ references.T
