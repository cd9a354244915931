"""Spectral clustering of embedding matrices.

The pipeline is the classical normalized-cut recipe: inner-product affinity
(negatives clamped to zero), symmetric normalized Laplacian, bottom-k
eigenvectors, row normalization, then k-means. The k-means here is written
out rather than borrowed because the contract reports empty clusters as-is
instead of reseeding them.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, eigsh

from .errors import NumericalError, ParameterError

# Below this size a dense eigendecomposition beats Lanczos iterations.
_DENSE_EIG_LIMIT = 500


@dataclass(frozen=True)
class ClusterConfig:
    k: int = 2
    affinity: str = "linear"   # linear | cosine
    kmeans_restarts: int = 10
    kmeans_max_iter: int = 300
    seed: int = 0

    def validate(self):
        if self.k < 2:
            raise ParameterError("k must be at least 2")
        if self.affinity not in ("linear", "cosine"):
            raise ParameterError(f"unknown affinity {self.affinity!r}")
        if self.kmeans_restarts < 1:
            raise ParameterError("kmeans_restarts must be at least 1")
        if self.kmeans_max_iter < 1:
            raise ParameterError("kmeans_max_iter must be at least 1")


def spectral_cluster(E, cfg):
    """Cluster embedding rows into cfg.k groups; returns a label vector.

    Deterministic under cfg.seed, and invariant to scaling E by a positive
    constant (the normalization cancels it).

    Raises:
        ParameterError: fewer rows than clusters.
        NumericalError: the iterative eigensolver fails to converge.
    """
    cfg.validate()
    n = E.shape[0]
    if n < cfg.k:
        raise ParameterError(f"cannot form {cfg.k} clusters from {n} rows")

    S = _affinity(E, cfg.affinity)
    # keep the degree vector invertible when a row has no affinity at all
    dead = S.sum(axis=1) == 0
    if dead.any():
        S[dead, dead] = 1.0
    inv_root = 1.0 / np.sqrt(S.sum(axis=1))
    N = S * inv_root[:, np.newaxis] * inv_root[np.newaxis, :]
    # bottom-k eigenvectors of I - N are the top-k of N
    U = _top_eigenvectors(N, cfg.k, cfg.seed)

    norms = np.linalg.norm(U, axis=1)
    nz = norms > 0
    U[nz] /= norms[nz, np.newaxis]
    labels, _ = kmeans(U, cfg.k, restarts=cfg.kmeans_restarts,
                       max_iter=cfg.kmeans_max_iter, seed=cfg.seed)
    return labels


def kmeans(X, k, restarts=10, max_iter=300, seed=0):
    """Best-inertia Lloyd iterations over k-means++ seeded restarts.

    Returns (labels, inertia). Labels always lie in [0, k); clusters that
    end up empty stay empty and are visible in the label set.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n == 0:
        raise ParameterError("cannot cluster an empty matrix")
    if k < 1 or k > n:
        raise ParameterError(f"k={k} outside [1, {n}]")

    best_labels, best_inertia = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        centers = _kmeanspp(X, k, rng)
        labels = None
        for _ in range(max_iter):
            d2 = _sq_dists(X, centers)
            new_labels = np.argmin(d2, axis=1)
            if labels is not None and np.array_equal(new_labels, labels):
                break
            labels = new_labels
            for j in range(k):
                members = labels == j
                if members.any():
                    centers[j] = X[members].mean(axis=0)
                # an empty cluster keeps its previous center
        inertia = float(np.sum(_sq_dists(X, centers).min(axis=1)))
        if inertia < best_inertia:
            best_inertia, best_labels = inertia, labels
    return best_labels, best_inertia


# ============================================================
# Internals
# ============================================================

def _affinity(E, kind):
    if kind == "cosine":
        E = _row_normalized(E)
    if sparse.issparse(E):
        S = np.asarray((E @ E.T).todense())
    else:
        E = np.asarray(E, dtype=float)
        S = E @ E.T
    np.maximum(S, 0.0, out=S)
    return S


def _row_normalized(E):
    if sparse.issparse(E):
        norms = np.sqrt(np.asarray(E.multiply(E).sum(axis=1)).ravel())
        inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        return sparse.diags(inv) @ E.tocsr()
    E = np.asarray(E, dtype=float)
    norms = np.linalg.norm(E, axis=1)
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return E * inv[:, np.newaxis]


def _top_eigenvectors(N, k, seed):
    n = N.shape[0]
    if n < _DENSE_EIG_LIMIT or k >= n - 1:
        vals, vecs = eigh(N)
        return np.ascontiguousarray(vecs[:, np.argsort(vals)[-k:]])
    v0 = np.random.default_rng(seed).standard_normal(n)
    try:
        vals, vecs = eigsh(N, k=k, which="LA", v0=v0,
                           maxiter=max(5000, 20 * n), ncv=min(n, max(4 * k + 1, 40)))
    except ArpackNoConvergence as exc:
        raise NumericalError(
            f"eigensolver did not converge within {max(5000, 20 * n)} iterations "
            f"({len(exc.eigenvalues)} of {k} eigenpairs found)"
        ) from exc
    except ArpackError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    return np.ascontiguousarray(vecs[:, np.argsort(vals)])


def _kmeanspp(X, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = _sq_dists(X, centers[:1]).ravel()
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            idx = rng.choice(n, p=d2 / total)
        else:
            idx = rng.integers(n)
        centers[j] = X[idx]
        d2 = np.minimum(d2, _sq_dists(X, centers[j:j + 1]).ravel())
    return centers


def _sq_dists(X, centers):
    d2 = (
        np.einsum("ij,ij->i", X, X)[:, np.newaxis]
        + np.einsum("ij,ij->i", centers, centers)[np.newaxis, :]
        - 2.0 * (X @ centers.T)
    )
    np.maximum(d2, 0.0, out=d2)
    return d2
