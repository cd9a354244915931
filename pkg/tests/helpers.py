"""Small graph builders shared across the test modules."""

import numpy as np
from scipy import sparse

from mwdk.graph import AttributedGraph


def make_graph(edges, features, labels=None):
    features = np.asarray(features, dtype=float)
    n = features.shape[0]
    if edges:
        row = [u for u, v in edges] + [v for u, v in edges]
        col = [v for u, v in edges] + [u for u, v in edges]
        adj = sparse.csr_matrix((np.ones(len(row)), (row, col)), shape=(n, n))
    else:
        adj = sparse.csr_matrix((n, n))
    if labels is not None:
        labels = np.asarray(labels, dtype=int)
    return AttributedGraph(adjacency=adj, features=features, labels=labels)


def random_graph(rng, n, p=0.3, d=4, labelled=False):
    mask = np.triu(rng.random((n, n)) < p, k=1)
    edges = list(zip(*np.nonzero(mask)))
    feats = rng.normal(size=(n, d))
    labels = rng.integers(0, 2, size=n) if labelled else None
    return make_graph(edges, feats, labels)


def two_blob_graph(rng, per_side=20, d=3, gap=8.0, p_in=0.6, p_out=0.05):
    """Two feature blobs with dense within-side and sparse cross-side edges."""
    n = 2 * per_side
    feats = rng.normal(size=(n, d))
    feats[per_side:] += gap
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            same = (i < per_side) == (j < per_side)
            if rng.random() < (p_in if same else p_out):
                edges.append((i, j))
    labels = [0] * per_side + [1] * per_side
    return make_graph(edges, feats, labels)
