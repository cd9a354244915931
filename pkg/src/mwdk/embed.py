"""Node embeddings: plain aggregation, one kernel map, or one map per level.

Three methods share the same aggregation machinery:

    wl    iterate the aggregation update directly on raw features
    wdk   one base-kernel feature map on raw features, then h aggregation
          updates in the mapped space
    mwdk  h+1 levels, each fitting a fresh isolation-kernel map on the
          current rows and applying exactly one aggregation update

The wdk base kernel is the isolation kernel by default; a Gaussian variant
maps each node to its Gram-matrix row instead. The multi-level method is
isolation-kernel only.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse

from .aggregate import AGGREGATORS, NORMALIZATIONS, build_operator, wl_step, wl_iterate
from .errors import ParameterError
from .ikernel import IKConfig, gk_gram, ik_fit, ik_transform

METHODS = ("wl", "wdk", "mwdk")
BASE_KERNELS = ("ik", "gk")


@dataclass(frozen=True)
class EmbedConfig:
    method: str = "mwdk"
    h: int = 3                    # update count for wl/wdk, level count - 1 for mwdk
    ik: IKConfig = IKConfig()
    norm: str = "wl"
    agg: str = "avg"
    concat: bool = False          # wl/wdk only; the multi-level method keeps its last level
    base_kernel: str = "ik"       # wdk only
    bandwidth: float | None = None  # Gaussian sigma; None = median heuristic

    def validate(self):
        if self.method not in METHODS:
            raise ParameterError(f"unknown method {self.method!r}")
        if self.h < 0:
            raise ParameterError("h must be nonnegative")
        if self.norm not in NORMALIZATIONS:
            raise ParameterError(f"unknown normalization {self.norm!r}")
        if self.agg not in AGGREGATORS:
            raise ParameterError(f"unknown aggregator {self.agg!r}")
        if self.base_kernel not in BASE_KERNELS:
            raise ParameterError(f"unknown base kernel {self.base_kernel!r}")
        if self.base_kernel == "gk" and self.method == "mwdk":
            raise ParameterError(
                "the Gaussian base kernel is supported for wdk only"
            )
        self.ik.validate()


def embed(g, cfg):
    """Dispatch to the configured embedding method."""
    cfg.validate()
    if cfg.method == "wl":
        return embed_wl(g, cfg)
    if cfg.method == "wdk":
        return embed_wdk(g, cfg)
    return embed_mwdk(g, cfg)


def embed_wl(g, cfg):
    """Aggregation updates applied directly to the raw feature matrix."""
    cfg.validate()
    op = build_operator(g, cfg.norm)
    return wl_iterate(np.asarray(g.features, dtype=float), op, cfg.h,
                      agg=cfg.agg, concat=cfg.concat)


def embed_wdk(g, cfg):
    """One base-kernel feature map, then h aggregation updates on the mapped rows."""
    cfg.validate()
    op = build_operator(g, cfg.norm)
    if cfg.base_kernel == "gk":
        base = gk_gram(g.features, cfg.bandwidth)
    else:
        model = ik_fit(np.asarray(g.features, dtype=float), cfg.ik)
        base = ik_transform(model, np.asarray(g.features, dtype=float))
    return wl_iterate(base, op, cfg.h, agg=cfg.agg, concat=cfg.concat)


def embed_mwdk(g, cfg):
    """Fresh isolation-kernel map plus one aggregation update per level.

    Runs cfg.h + 1 levels and returns the final one. Level i fits its map
    with seed cfg.ik.seed + i, so any prefix of a run reproduces the run
    with the smaller level count.
    """
    if cfg.base_kernel == "gk":
        raise ParameterError("the Gaussian base kernel is supported for wdk only")
    cfg.validate()
    out = None
    for _, out in mwdk_levels(g, cfg, cfg.h + 1):
        pass
    return out


def mwdk_levels(g, cfg, n_levels):
    """Yield (mapped, aggregated) per level of the multi-level embedding.

    `mapped` is the sparse binary output of the level's isolation-kernel
    map, `aggregated` the rows after the level's single update. The next
    level fits on `aggregated`.
    """
    op = build_operator(g, cfg.norm)
    cur = np.asarray(g.features, dtype=float)
    for level in range(n_levels):
        ik_cfg = replace(cfg.ik, seed=cfg.ik.seed + level)
        model = ik_fit(cur, ik_cfg)
        mapped = ik_transform(model, cur)
        cur = wl_step(mapped, op, cfg.agg)
        yield mapped, cur


# ============================================================
# Export helpers
# ============================================================

def save_embedding(E, path):
    """Write an embedding matrix to disk.

    Dense matrices become CSV; sparse ones become coordinate triplets
    ("row col value" per line, preceded by a "shape rows cols" line).
    """
    if sparse.issparse(E):
        coo = E.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"shape {E.shape[0]} {E.shape[1]}\n")
            for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
                fh.write(f"{r} {c} {float(v)!r}\n")
    else:
        np.savetxt(path, np.asarray(E), delimiter=",", fmt="%.17g")
