"""Optimization-free graph embedding and spectral community detection."""

__version__ = "0.1.0"

from .cluster import ClusterConfig, kmeans, spectral_cluster
from .embed import EmbedConfig, embed, embed_mwdk, embed_wdk, embed_wl
from .errors import DataError, NumericalError, ParameterError
from .evaluate import (community_similarity, metric_acc, metric_ari,
                       metric_nmi, mu_similar_fraction, smoothing_curve)
from .graph import (AttributedGraph, NoiseSpec, SyntheticSpec,
                    generate_synthetic, load_graph, perturb_edges, save_graph)
from .ikernel import IKConfig, ik_fit, ik_similarity, ik_transform

__all__ = [
    "AttributedGraph",
    "ClusterConfig",
    "DataError",
    "EmbedConfig",
    "IKConfig",
    "NoiseSpec",
    "NumericalError",
    "ParameterError",
    "SyntheticSpec",
    "community_similarity",
    "embed",
    "embed_mwdk",
    "embed_wdk",
    "embed_wl",
    "generate_synthetic",
    "ik_fit",
    "ik_similarity",
    "ik_transform",
    "kmeans",
    "load_graph",
    "metric_acc",
    "metric_ari",
    "metric_nmi",
    "mu_similar_fraction",
    "perturb_edges",
    "save_graph",
    "smoothing_curve",
    "spectral_cluster",
]
