"""Figure rendering for the report-producing commands.

Every figure sits next to the CSV it visualizes; the CSV stays the
authoritative artifact. All functions take prepared arrays and a target
path and return that path.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150

_METHOD_STYLE = {
    "wl": dict(color="tab:blue", marker="o"),
    "wdk": dict(color="tab:orange", marker="s"),
    "mwdk": dict(color="tab:green", marker="^"),
}


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def plot_metric_runs(report, path, title=""):
    """Per-repetition metric values as grouped bars."""
    runs = np.arange(len(report.acc_runs))
    width = 0.27
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    ax.bar(runs - width, report.acc_runs, width, label="acc")
    ax.bar(runs, report.nmi_runs, width, label="nmi")
    ax.bar(runs + width, report.ari_runs, width, label="ari")
    ax.set_xlabel("repetition")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1.05)
    if title:
        ax.set_title(title)
    ax.legend(frameon=False)
    return _finish(fig, path)


def plot_sweep_heatmap(psis, hs, nmi_grid, path):
    """Mean NMI over the (psi, h) grid."""
    fig, ax = plt.subplots(figsize=(1.2 + 0.7 * len(hs), 1.2 + 0.55 * len(psis)))
    im = ax.imshow(nmi_grid, cmap="viridis", aspect="auto")
    ax.set_xticks(range(len(hs)), [str(h) for h in hs])
    ax.set_yticks(range(len(psis)), [str(p) for p in psis])
    ax.set_xlabel("h")
    ax.set_ylabel("psi")
    for i in range(len(psis)):
        for j in range(len(hs)):
            ax.text(j, i, f"{nmi_grid[i, j]:.2f}", ha="center", va="center",
                    color="white", fontsize=8)
    fig.colorbar(im, ax=ax, label="NMI")
    return _finish(fig, path)


def plot_noise_curves(rows, path):
    """NMI against added cross-label edges, one line per method and removal level.

    `rows` are dicts with method, interclass_add, intraclass_remove, nmi.
    Skipped cells (nmi None) are left out.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    removes = sorted({r["intraclass_remove"] for r in rows})
    styles = ["-", "--", ":", "-."]
    for method in sorted({r["method"] for r in rows}):
        for ri, rem in enumerate(removes):
            pts = [(r["interclass_add"], r["nmi"]) for r in rows
                   if r["method"] == method and r["intraclass_remove"] == rem
                   and r["nmi"] is not None]
            if not pts:
                continue
            pts.sort()
            label = method if rem == removes[0] else f"{method} (-{rem})"
            ax.plot([p[0] for p in pts], [p[1] for p in pts],
                    styles[ri % len(styles)], label=label,
                    **_METHOD_STYLE.get(method, {}))
    ax.set_xlabel("added cross-label edges")
    ax.set_ylabel("NMI")
    ax.legend(frameon=False, fontsize=8)
    return _finish(fig, path)


def plot_smoothing_curves(curves, path):
    """Within and between community similarity per iteration, one panel per method."""
    fig, axes = plt.subplots(1, len(curves), figsize=(4.0 * len(curves), 3.4),
                             squeeze=False)
    for ax, (method, curve) in zip(axes[0], curves.items()):
        ax.plot(curve.h_values, curve.s_within_1, "o-", ms=3, label="S(C1)")
        ax.plot(curve.h_values, curve.s_within_2, "s-", ms=3, label="S(C2)")
        ax.plot(curve.h_values, curve.s_between, "^-", ms=3, label="S(C1,C2)")
        ax.set_title(method)
        ax.set_xlabel("h")
        ax.set_ylabel("similarity")
        ax.legend(frameon=False, fontsize=8)
    return _finish(fig, path)


def plot_scaleup(ns, seconds, path):
    """Embedding wall time against n on log-log axes."""
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    ax.loglog(ns, seconds, "o-")
    if len(ns) >= 2:
        slope = np.polyfit(np.log(ns), np.log(seconds), 1)[0]
        ax.set_title(f"log-log slope {slope:.2f}")
    ax.set_xlabel("nodes")
    ax.set_ylabel("embedding seconds")
    return _finish(fig, path)
