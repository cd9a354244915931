"""Run configuration: strict JSON loading, presets, and seed derivation.

A run config is a JSON document with sections dataset, embed, cluster,
eval, and output plus a global seed. Unknown keys anywhere are rejected
with their dotted path, so a manifest either replays exactly or fails
loudly.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .cluster import ClusterConfig
from .embed import EmbedConfig, BASE_KERNELS, METHODS
from .errors import ParameterError
from .graph import SyntheticSpec, generate_synthetic, load_graph
from .ikernel import IKConfig

PRESETS = {
    # two equal-density Gaussian clusters, low cross-cluster rate
    "eee": dict(mu=(0.0, 5.0), sigma=(10.0, 10.0), alpha=(6e-3, 6e-3), beta=6e-4),
    # same clusters, three times the cross-cluster rate
    "eeh": dict(mu=(0.0, 5.0), sigma=(10.0, 10.0), alpha=(6e-3, 6e-3), beta=18e-4),
    # unequal feature spread
    "ue": dict(mu=(0.0, 5.0), sigma=(30.0, 10.0), alpha=(6e-3, 6e-3), beta=6e-4),
    # unequal edge density
    "eu": dict(mu=(0.0, 5.0), sigma=(10.0, 10.0), alpha=(6e-3, 3e-3), beta=6e-4),
}

_METHOD_KEYS = ("wl", "wdk", "mwdk")


@dataclass
class DatasetSource:
    """Where a run's graph comes from: a generator spec or files on disk."""

    spec: SyntheticSpec | None = None
    preset: str | None = None
    edges: Path | None = None
    features: Path | None = None
    labels: Path | None = None

    def load(self):
        if self.spec is not None:
            return generate_synthetic(self.spec)
        if self.edges is None:
            raise ParameterError(
                "dataset section requires a preset, a spec, or file paths"
            )
        return load_graph(self.edges, self.features, self.labels)


@dataclass
class RunConfig:
    seed: int = 0
    dataset: DatasetSource = field(default_factory=DatasetSource)
    embed: EmbedConfig = field(default_factory=EmbedConfig)
    h_by_method: dict | None = None
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    reps: int = 10
    out_dir: Path = Path("out")
    figures: bool = True
    resolved: dict = field(default_factory=dict)

    def embed_for_run(self, run_index, method=None, h=None, psi=None):
        """Embed config for one repetition: seeds derive as seed + run index."""
        ik = IKConfig(psi=self.embed.ik.psi if psi is None else psi,
                      t=self.embed.ik.t,
                      seed=self.seed + run_index)
        changes = {"ik": ik}
        if method is not None:
            changes["method"] = method
        if h is not None:
            changes["h"] = h
        from dataclasses import replace

        return replace(self.embed, **changes)

    def cluster_for_run(self, run_index):
        from dataclasses import replace

        return replace(self.cluster, seed=self.seed + run_index)

    def method_plan(self):
        """(method, h) pairs for multi-method commands.

        Uses embed.h_by_method when configured, otherwise runs the three
        methods at the single configured h.
        """
        if self.h_by_method:
            return [(m, self.h_by_method[m]) for m in _METHOD_KEYS
                    if m in self.h_by_method]
        return [(m, self.embed.h) for m in _METHOD_KEYS]

    def manifest(self, command):
        blob = json.dumps(self.resolved, sort_keys=True).encode("utf-8")
        return {
            "command": command,
            "seed": self.seed,
            "config": self.resolved,
            "config_sha256": hashlib.sha256(blob).hexdigest(),
        }


def preset_spec(name, seed):
    if name not in PRESETS:
        raise ParameterError(
            f"unknown preset {name!r}; choose one of {sorted(PRESETS)}"
        )
    return SyntheticSpec(seed=seed, **PRESETS[name])


def load_config(path=None, preset=None, seed=None, reps=None, out=None):
    """Build a RunConfig from an optional JSON file plus flag overrides.

    Flag values win over file values. With no file at all, defaults apply
    (a preset is then required to define the dataset).
    """
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ParameterError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParameterError(f"{path}: invalid JSON ({exc})") from exc
        if not isinstance(raw, dict):
            raise ParameterError(f"{path}: top level must be a JSON object")
    return _parse_config(raw, preset=preset, seed=seed, reps=reps, out=out)


# ============================================================
# Section parsing
# ============================================================

def _parse_config(raw, preset=None, seed=None, reps=None, out=None):
    _expect_keys(raw, {"seed", "dataset", "embed", "cluster", "eval", "output"}, "")
    cfg_seed = _as_int(raw.get("seed", 0), "seed")
    if seed is not None:
        cfg_seed = seed

    dataset_raw = raw.get("dataset", {})
    _require_obj(dataset_raw, "dataset")
    if preset is not None:
        dataset_raw = {"preset": preset}
    dataset = _parse_dataset(dataset_raw, cfg_seed)

    embed_cfg, h_by_method = _parse_embed(raw.get("embed", {}), cfg_seed)
    cluster_cfg = _parse_cluster(raw.get("cluster", {}))
    eval_raw = raw.get("eval", {})
    _require_obj(eval_raw, "eval")
    _expect_keys(eval_raw, {"reps"}, "eval")
    cfg_reps = _as_int(eval_raw.get("reps", 10), "eval.reps")
    if reps is not None:
        cfg_reps = reps
    if cfg_reps < 1:
        raise ParameterError("eval.reps must be at least 1")

    output_raw = raw.get("output", {})
    _require_obj(output_raw, "output")
    _expect_keys(output_raw, {"dir", "figures"}, "output")
    out_dir = Path(output_raw.get("dir", "out"))
    if out is not None:
        out_dir = Path(out)
    figures = output_raw.get("figures", True)
    if not isinstance(figures, bool):
        raise ParameterError("output.figures must be a boolean")

    resolved = {
        "seed": cfg_seed,
        "dataset": _dataset_dict(dataset),
        "embed": _embed_dict(embed_cfg, h_by_method),
        "cluster": {
            "k": cluster_cfg.k,
            "affinity": cluster_cfg.affinity,
            "restarts": cluster_cfg.kmeans_restarts,
            "max_iter": cluster_cfg.kmeans_max_iter,
        },
        "eval": {"reps": cfg_reps},
        "output": {"dir": str(out_dir), "figures": figures},
    }
    return RunConfig(seed=cfg_seed, dataset=dataset, embed=embed_cfg,
                     h_by_method=h_by_method, cluster=cluster_cfg, reps=cfg_reps,
                     out_dir=out_dir, figures=figures, resolved=resolved)


def _parse_dataset(raw, cfg_seed):
    _expect_keys(raw, {"preset", "spec", "edges", "features", "labels"}, "dataset")
    has_preset = "preset" in raw
    has_spec = "spec" in raw
    has_files = "edges" in raw or "features" in raw or "labels" in raw
    if sum([has_preset, has_spec, has_files]) > 1:
        raise ParameterError(
            "dataset accepts exactly one of: preset, spec, or edge/feature files"
        )
    if has_preset:
        name = raw["preset"]
        if not isinstance(name, str):
            raise ParameterError("dataset.preset must be a string")
        return DatasetSource(spec=preset_spec(name.lower(), cfg_seed),
                             preset=name.lower())
    if has_spec:
        spec_raw = raw["spec"]
        _require_obj(spec_raw, "dataset.spec")
        allowed = {"mu", "sigma", "alpha", "beta", "nodes_per_cluster", "dims", "seed"}
        _expect_keys(spec_raw, allowed, "dataset.spec")
        spec = SyntheticSpec(
            mu=_as_pair(spec_raw.get("mu", (0.0, 5.0)), "dataset.spec.mu"),
            sigma=_as_pair(spec_raw.get("sigma", (10.0, 10.0)), "dataset.spec.sigma"),
            alpha=_as_pair(spec_raw.get("alpha", (6e-3, 6e-3)), "dataset.spec.alpha"),
            beta=_as_float(spec_raw.get("beta", 6e-4), "dataset.spec.beta"),
            nodes_per_cluster=_as_int(spec_raw.get("nodes_per_cluster", 1000),
                                      "dataset.spec.nodes_per_cluster"),
            dims=_as_int(spec_raw.get("dims", 100), "dataset.spec.dims"),
            seed=_as_int(spec_raw.get("seed", cfg_seed), "dataset.spec.seed"),
        )
        spec.validate()
        return DatasetSource(spec=spec)
    if has_files:
        if "edges" not in raw or "features" not in raw:
            raise ParameterError("dataset files need both edges and features paths")
        return DatasetSource(
            edges=Path(raw["edges"]),
            features=Path(raw["features"]),
            labels=Path(raw["labels"]) if "labels" in raw else None,
        )
    # commands that build their own data (scale-up timing) need no source;
    # DatasetSource.load raises for the ones that do
    return DatasetSource()


def _parse_embed(raw, cfg_seed):
    _require_obj(raw, "embed")
    allowed = {"method", "h", "psi", "t", "norm", "agg", "concat",
               "base_kernel", "bandwidth", "h_by_method"}
    _expect_keys(raw, allowed, "embed")
    method = raw.get("method", "mwdk")
    if method not in METHODS:
        raise ParameterError(f"embed.method must be one of {METHODS}")
    base_kernel = raw.get("base_kernel", "ik")
    if base_kernel not in BASE_KERNELS:
        raise ParameterError(f"embed.base_kernel must be one of {BASE_KERNELS}")
    bandwidth = raw.get("bandwidth")
    if bandwidth is not None:
        bandwidth = _as_float(bandwidth, "embed.bandwidth")
    h_by_method = None
    if "h_by_method" in raw:
        _require_obj(raw["h_by_method"], "embed.h_by_method")
        _expect_keys(raw["h_by_method"], set(_METHOD_KEYS), "embed.h_by_method")
        h_by_method = {m: _as_int(v, f"embed.h_by_method.{m}")
                       for m, v in raw["h_by_method"].items()}
    cfg = EmbedConfig(
        method=method,
        h=_as_int(raw.get("h", 3), "embed.h"),
        ik=IKConfig(psi=_as_int(raw.get("psi", 64), "embed.psi"),
                    t=_as_int(raw.get("t", 100), "embed.t"),
                    seed=cfg_seed),
        norm=raw.get("norm", "wl"),
        agg=raw.get("agg", "avg"),
        concat=raw.get("concat", False),
        base_kernel=base_kernel,
        bandwidth=bandwidth,
    )
    if not isinstance(cfg.concat, bool):
        raise ParameterError("embed.concat must be a boolean")
    cfg.validate()
    return cfg, h_by_method


def _parse_cluster(raw):
    _require_obj(raw, "cluster")
    _expect_keys(raw, {"k", "affinity", "restarts", "max_iter"}, "cluster")
    cfg = ClusterConfig(
        k=_as_int(raw.get("k", 2), "cluster.k"),
        affinity=raw.get("affinity", "linear"),
        kmeans_restarts=_as_int(raw.get("restarts", 10), "cluster.restarts"),
        kmeans_max_iter=_as_int(raw.get("max_iter", 300), "cluster.max_iter"),
    )
    cfg.validate()
    return cfg


def _dataset_dict(dataset):
    if dataset.preset is None and dataset.spec is None and dataset.edges is None:
        return {}
    if dataset.preset is not None:
        out = {"preset": dataset.preset}
    elif dataset.spec is not None:
        out = {"spec": {
            "mu": list(dataset.spec.mu),
            "sigma": list(dataset.spec.sigma),
            "alpha": list(dataset.spec.alpha),
            "beta": dataset.spec.beta,
            "nodes_per_cluster": dataset.spec.nodes_per_cluster,
            "dims": dataset.spec.dims,
            "seed": dataset.spec.seed,
        }}
    else:
        out = {"edges": str(dataset.edges), "features": str(dataset.features)}
        if dataset.labels is not None:
            out["labels"] = str(dataset.labels)
    if dataset.preset is not None and dataset.spec is not None:
        out["spec_seed"] = dataset.spec.seed
    return out


def _embed_dict(cfg, h_by_method):
    out = {
        "method": cfg.method,
        "h": cfg.h,
        "psi": cfg.ik.psi,
        "t": cfg.ik.t,
        "norm": cfg.norm,
        "agg": cfg.agg,
        "concat": cfg.concat,
        "base_kernel": cfg.base_kernel,
        "bandwidth": cfg.bandwidth,
    }
    if h_by_method:
        out["h_by_method"] = dict(h_by_method)
    return out


# ============================================================
# Primitive checks
# ============================================================

def _expect_keys(d, allowed, path):
    for key in d:
        if key not in allowed:
            where = f"{path}.{key}" if path else key
            raise ParameterError(f"unknown config key: {where}")


def _require_obj(value, path):
    if not isinstance(value, dict):
        raise ParameterError(f"{path} must be a JSON object")


def _as_int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParameterError(f"{path} must be an integer")
    return value


def _as_float(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"{path} must be a number")
    return float(value)


def _as_pair(value, path):
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float))
                   for v in value)):
        raise ParameterError(f"{path} must be a pair of numbers")
    return (float(value[0]), float(value[1]))
