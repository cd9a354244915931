"""Neighborhood aggregation: normalized operators and the iterated update.

The basic update halves each node's own features and adds half of a
neighborhood summary. For the averaging aggregator the summary is op @ X
with op one of three degree normalizations; for min/max it is the
componentwise reduction over the 1-hop neighborhood.
"""

import numpy as np
from scipy import sparse

from .errors import ParameterError

NORMALIZATIONS = ("sym", "rw", "wl")
AGGREGATORS = ("avg", "min", "max", "all")

# Sparse intermediates are densified once they are mostly full; beyond this
# fill the CSR overhead costs more than it saves.
_DENSIFY_FILL = 0.5


def build_operator(g, kind="wl"):
    """Degree-normalized adjacency operator.

    kind "sym" gives D^{-1/2} A D^{-1/2}, "rw" gives A D^{-1}, and "wl"
    gives D^{-1} A. Rows of degree-0 nodes become identity rows, so isolated
    nodes are fixed points of the averaging update.
    """
    if kind not in NORMALIZATIONS:
        raise ParameterError(f"unknown normalization {kind!r}")
    adj = g.adjacency.tocsr()
    deg = np.asarray(adj.sum(axis=1)).ravel()
    nz = deg > 0
    if kind == "sym":
        half = np.zeros_like(deg)
        half[nz] = 1.0 / np.sqrt(deg[nz])
        op = sparse.diags(half) @ adj @ sparse.diags(half)
    elif kind == "rw":
        inv = np.zeros_like(deg)
        inv[nz] = 1.0 / deg[nz]
        op = adj @ sparse.diags(inv)
    else:
        inv = np.zeros_like(deg)
        inv[nz] = 1.0 / deg[nz]
        op = sparse.diags(inv) @ adj
    if not nz.all():
        isolated = np.flatnonzero(~nz)
        fallback = sparse.csr_matrix(
            (np.ones(isolated.size), (isolated, isolated)), shape=adj.shape
        )
        op = op + fallback
    return op.tocsr()


def wl_step(X, op, agg="avg"):
    """One aggregation update: 0.5 * (X + neighborhood summary).

    Avg uses op @ X; min/max reduce componentwise over the neighborhood
    (pattern of op), falling back to the node itself when it has no
    neighbors; "all" concatenates the min, max, and avg results along the
    feature axis.
    """
    if agg not in AGGREGATORS:
        raise ParameterError(f"unknown aggregator {agg!r}")
    if X.shape[0] != op.shape[0]:
        raise ParameterError(
            f"feature rows ({X.shape[0]}) do not match operator size ({op.shape[0]})"
        )
    if agg == "avg":
        return _maybe_densify(_half_sum(X, op @ X))
    if agg == "all":
        parts = [wl_step(X, op, a) for a in ("min", "max", "avg")]
        if any(not sparse.issparse(p) for p in parts):
            parts = [_to_dense(p) for p in parts]
            return np.hstack(parts)
        return sparse.hstack(parts, format="csr")
    return _maybe_densify(_half_sum(X, _neighborhood_reduce(X, op, agg)))


def wl_iterate(X, op, h, agg="avg", concat=False):
    """Apply h aggregation updates; optionally concatenate all h+1 iterates."""
    if h < 0:
        raise ParameterError("iteration count must be nonnegative")
    iterates = [X]
    cur = X
    for _ in range(h):
        cur = wl_step(cur, op, agg)
        iterates.append(cur)
    if not concat:
        return cur
    if all(sparse.issparse(it) for it in iterates):
        return sparse.hstack(iterates, format="csr")
    return np.hstack([_to_dense(it) for it in iterates])


# ============================================================
# Internals
# ============================================================

def _half_sum(a, b):
    if sparse.issparse(a) and sparse.issparse(b):
        return (a + b) * 0.5
    return 0.5 * (_to_dense(a) + _to_dense(b))


def _neighborhood_reduce(X, op, agg):
    """Componentwise min or max of X over each row's neighborhood in op."""
    dense = _to_dense(X)
    fn = np.min if agg == "min" else np.max
    out = np.empty_like(dense)
    indptr, indices = op.indptr, op.indices
    for i in range(op.shape[0]):
        nbrs = indices[indptr[i]:indptr[i + 1]]
        # isolated nodes carry an identity row in op, so nbrs == [i] there
        out[i] = fn(dense[nbrs], axis=0) if nbrs.size else dense[i]
    return out


def _maybe_densify(X):
    if sparse.issparse(X):
        fill = X.nnz / (X.shape[0] * X.shape[1])
        if fill > _DENSIFY_FILL:
            return np.asarray(X.todense())
    return X


def _to_dense(X):
    return np.asarray(X.todense()) if sparse.issparse(X) else np.asarray(X)
