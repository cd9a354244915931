"""Command-line driver for reproducible embedding and clustering experiments.

Subcommands:
    generate   write a synthetic dataset (edges/features/labels) to disk
    run        embed, cluster, and score over seeded repetitions
    sweep      mean metrics over a (psi, h) grid
    noise      metric response to added cross-label / removed within-label edges
    smoothing  community-similarity curves per method over h
    scaleup    embedding wall time against graph size

Every command writes its CSV artifacts plus a manifest.json capturing the
resolved config, its hash, and the global seed; matching figures render
alongside unless output.figures is false. Exit codes: 0 success, 2 usage
error, 3 data error, 4 numerical error.
"""

import argparse
import contextlib
import itertools
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .cluster import spectral_cluster
from .config import RunConfig, load_config, preset_spec
from .embed import embed
from .errors import DataError, NumericalError, ParameterError
from .evaluate import (MetricReport, metric_acc, metric_ari, metric_nmi,
                       smoothing_curve, write_curve_csv)
from .graph import NoiseSpec, generate_synthetic, perturb_edges, save_graph
from .ikernel import IKConfig


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        with _thread_limit(args.threads):
            return args.func(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mwdk",
        description="Optimization-free graph embedding and community detection",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run configuration file")
        p.add_argument("--preset", help="synthetic dataset preset (eee, eeh, ue, eu)")
        p.add_argument("--seed", type=int, help="global seed override")
        p.add_argument("--reps", type=int, help="repetition count override")
        p.add_argument("--out", help="output directory override")
        p.add_argument("--threads", type=int, default=None,
                       help="BLAS thread cap (best effort)")

    p = sub.add_parser("generate", help="write a synthetic dataset to disk")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="embed, cluster, and score one configuration")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="grid of mean metrics over psi and h")
    common(p)
    p.add_argument("--psi-grid", default="2,4,6,8,16,32,64,128",
                   help="comma-separated psi values")
    p.add_argument("--h-grid", default="3,5,7", help="comma-separated h values")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("noise", help="metrics under edge-noise perturbation")
    common(p)
    p.add_argument("--interclass", default="0",
                   help="comma-separated counts of cross-label edges to add")
    p.add_argument("--intraclass", default="0",
                   help="comma-separated counts of within-label edges to remove")
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("smoothing", help="community-similarity curves per method")
    common(p)
    p.add_argument("--h-max", type=int, default=10, help="largest iteration count")
    p.set_defaults(func=cmd_smoothing)

    p = sub.add_parser("scaleup", help="embedding wall time against graph size")
    common(p)
    p.add_argument("--sizes", default="2000,4000,8000,16000",
                   help="comma-separated ascending node counts")
    p.set_defaults(func=cmd_scaleup)
    return parser


# ============================================================
# Commands
# ============================================================

def cmd_generate(args):
    cfg = _load(args)
    if cfg.dataset.spec is None:
        raise ParameterError("generate requires a preset or a dataset spec")
    g = generate_synthetic(cfg.dataset.spec)
    out = _ensure_out(cfg)
    paths = save_graph(g, out)
    _write_manifest(cfg, "generate", out,
                    files={k: str(v) for k, v in paths.items()},
                    stats={"n": g.n, "m": g.m})
    print(f"wrote {g.n} nodes, {g.m} edges to {out}")
    return 0


def cmd_run(args):
    cfg = _load(args)
    g = cfg.dataset.load()
    report, assignments = _pipeline_report(g, cfg)
    out = _ensure_out(cfg)
    _write_metrics_csv(out / "metrics.csv", report)
    for r, labels in enumerate(assignments):
        np.savetxt(out / f"assignments_run{r}.txt", labels, fmt="%d")
    if cfg.figures:
        from .plotting import plot_metric_runs

        plot_metric_runs(report, out / "metrics.png",
                         title=f"{cfg.embed.method}, h={cfg.embed.h}")
    _write_manifest(cfg, "run", out)
    print(f"acc={report.acc:.4f} nmi={report.nmi:.4f} ari={report.ari:.4f} "
          f"({cfg.reps} repetitions)")
    return 0


def cmd_sweep(args):
    cfg = _load(args)
    psis = _int_list(args.psi_grid, "--psi-grid")
    hs = _int_list(args.h_grid, "--h-grid")
    g = cfg.dataset.load()
    rows = []
    grid = np.zeros((len(psis), len(hs)))
    for (i, psi), (j, h) in itertools.product(enumerate(psis), enumerate(hs)):
        report, _ = _pipeline_report(g, cfg, h=h, psi=psi)
        grid[i, j] = report.nmi
        rows.append([psi, h, _r(report.acc), _r(report.nmi), _r(report.ari)])
    out = _ensure_out(cfg)
    _write_csv(out / "sweep.csv", ["psi", "h", "acc", "nmi", "ari"], rows)
    if cfg.figures:
        from .plotting import plot_sweep_heatmap

        plot_sweep_heatmap(psis, hs, grid, out / "sweep.png")
    _write_manifest(cfg, "sweep", out, grid={"psi": psis, "h": hs})
    print(f"swept {len(rows)} cells to {out / 'sweep.csv'}")
    return 0


def cmd_noise(args):
    cfg = _load(args)
    adds = _int_list(args.interclass, "--interclass")
    removes = _int_list(args.intraclass, "--intraclass")
    g = cfg.dataset.load()
    if g.labels is None:
        raise DataError("noise study requires ground-truth labels")
    plan = cfg.method_plan()
    rows = []
    plot_rows = []
    for cell, (add, rem) in enumerate(itertools.product(adds, removes)):
        noise = NoiseSpec(interclass_add=add, intraclass_remove=rem,
                          seed=cfg.seed + cell)
        try:
            perturbed = perturb_edges(g, noise)
        except ParameterError:
            for method, _ in plan:
                rows.append([method, add, rem, "", "skipped"])
                plot_rows.append(dict(method=method, interclass_add=add,
                                      intraclass_remove=rem, nmi=None))
            continue
        for method, h in plan:
            report, _ = _pipeline_report(perturbed, cfg, method=method, h=h)
            rows.append([method, add, rem, _r(report.nmi), "ok"])
            plot_rows.append(dict(method=method, interclass_add=add,
                                  intraclass_remove=rem, nmi=report.nmi))
    out = _ensure_out(cfg)
    _write_csv(out / "noise.csv",
               ["method", "interclass_add", "intraclass_remove", "nmi", "status"],
               rows)
    if cfg.figures:
        from .plotting import plot_noise_curves

        plot_noise_curves(plot_rows, out / "noise.png")
    _write_manifest(cfg, "noise", out, grid={"interclass": adds,
                                             "intraclass": removes})
    print(f"wrote {len(rows)} noise cells to {out / 'noise.csv'}")
    return 0


def cmd_smoothing(args):
    cfg = _load(args)
    if args.h_max < 0:
        raise ParameterError("--h-max must be nonnegative")
    g = cfg.dataset.load()
    out = _ensure_out(cfg)
    curves = {}
    for method in ("wl", "wdk", "mwdk"):
        ecfg = replace(cfg.embed, method=method,
                       ik=IKConfig(psi=cfg.embed.ik.psi, t=cfg.embed.ik.t,
                                   seed=cfg.seed))
        curve = smoothing_curve(g, ecfg, args.h_max)
        curves[method] = curve
        write_curve_csv(curve, out / f"smoothing_{method}.csv")
    if cfg.figures:
        from .plotting import plot_smoothing_curves

        plot_smoothing_curves(curves, out / "smoothing.png")
    _write_manifest(cfg, "smoothing", out, grid={"h_max": args.h_max})
    print(f"wrote smoothing curves for 3 methods to {out}")
    return 0


def cmd_scaleup(args):
    cfg = _load(args)
    sizes = _int_list(args.sizes, "--sizes")
    if sizes != sorted(sizes):
        raise ParameterError("--sizes must be ascending")
    base = preset_spec("eee", cfg.seed)
    rows = []
    ns, secs = [], []
    # timing wants one BLAS thread unless the caller asked otherwise
    limit = args.threads if args.threads is not None else 1
    for i, n in enumerate(sizes):
        if n < 2 or n % 2:
            raise ParameterError("sizes must be even counts of at least 2")
        factor = (2 * base.nodes_per_cluster) / n
        spec = replace(base,
                       alpha=tuple(a * factor for a in base.alpha),
                       beta=base.beta * factor,
                       nodes_per_cluster=n // 2,
                       seed=cfg.seed + i)
        g = generate_synthetic(spec)
        ecfg = cfg.embed_for_run(0)
        with _thread_limit(limit):
            start = time.perf_counter()
            embed(g, ecfg)
            elapsed = time.perf_counter() - start
        rows.append([cfg.embed.method, n, g.m, _r(elapsed)])
        ns.append(n)
        secs.append(elapsed)
    out = _ensure_out(cfg)
    _write_csv(out / "scaleup.csv", ["method", "n", "m", "seconds"], rows)
    if cfg.figures:
        from .plotting import plot_scaleup

        plot_scaleup(ns, secs, out / "scaleup.png")
    _write_manifest(cfg, "scaleup", out, grid={"sizes": sizes})
    print(f"timed {len(sizes)} sizes to {out / 'scaleup.csv'}")
    return 0


# ============================================================
# Pipeline plumbing
# ============================================================

def _pipeline_report(g, cfg, method=None, h=None, psi=None):
    """Embed + cluster + score over cfg.reps seeded repetitions.

    Methods whose embedding draws no randomness (wl, and wdk with the
    Gaussian kernel) embed once and reuse the matrix across repetitions.
    """
    if g.labels is None:
        raise DataError("metrics require ground-truth labels")
    report = MetricReport()
    assignments = []
    cached = None
    for r in range(cfg.reps):
        ecfg = cfg.embed_for_run(r, method=method, h=h, psi=psi)
        deterministic = ecfg.method == "wl" or (
            ecfg.method == "wdk" and ecfg.base_kernel == "gk")
        if deterministic and cached is not None:
            E = cached
        else:
            E = embed(g, ecfg)
            if deterministic:
                cached = E
        labels = spectral_cluster(E, cfg.cluster_for_run(r))
        report.add(cfg.seed + r,
                   metric_acc(labels, g.labels),
                   metric_nmi(labels, g.labels),
                   metric_ari(labels, g.labels))
        assignments.append(labels)
    return report, assignments


def _load(args):
    cfg = load_config(path=args.config, preset=args.preset, seed=args.seed,
                      reps=args.reps, out=args.out)
    return cfg


def _ensure_out(cfg):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    return cfg.out_dir


def _thread_limit(n):
    if n is None:
        return contextlib.nullcontext()
    try:
        from threadpoolctl import threadpool_limits

        return threadpool_limits(limits=n)
    except ImportError:
        return contextlib.nullcontext()


def _int_list(text, flag):
    items = [part for part in text.split(",") if part.strip()]
    if not items:
        raise ParameterError(f"{flag} must list at least one integer")
    try:
        return [int(part) for part in items]
    except ValueError:
        raise ParameterError(f"{flag} must be comma-separated integers")


def _r(value):
    """Full-precision float formatting so CSVs re-parse exactly."""
    return repr(float(value))


def _write_csv(path, header, rows):
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_metrics_csv(path, report):
    rows = [[r, report.seeds[r], _r(report.acc_runs[r]), _r(report.nmi_runs[r]),
             _r(report.ari_runs[r])] for r in range(len(report.seeds))]
    rows.append(["mean", "", _r(report.acc), _r(report.nmi), _r(report.ari)])
    _write_csv(path, ["run", "seed", "acc", "nmi", "ari"], rows)


def _write_manifest(cfg, command, out, **extra):
    manifest = cfg.manifest(command)
    manifest["version"] = __version__
    manifest.update(extra)
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    sys.exit(main())
