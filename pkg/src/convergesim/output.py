"""CSV and SVG emission for sweep results.

Both writers are byte-deterministic for a given :class:`SweepResult`.
"""

from __future__ import annotations

import io
import math
import os
from typing import Iterable

from .metrics import SweepResult
from .schemes import OptimizerTrace

CSV_COLUMNS = (
    "scheme", "alpha", "lambda_norm", "drops",
    "mean_interference_w", "ci95_interference_w", "norm_interference",
    "mean_flow_bps", "mean_power_w", "mean_eff_bpj", "ci95_eff_bpj", "norm_eff",
)
PLOT_METRICS = {
    "interference": ("norm_interference", "ci95_interference_w", "mean_interference_w",
                     "Normalized average interference"),
    "efficiency": ("norm_eff", "ci95_eff_bpj", "mean_eff_bpj",
                   "Normalized energy efficiency"),
}


def _cell(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def csv_text(result: SweepResult) -> str:
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for p in result.points:
        out.write(",".join(_cell(getattr(p, c)) for c in CSV_COLUMNS) + "\n")
    out.write(f"# config_digest={result.config_digest} master_seed={result.master_seed} "
              f"resampled_drops={result.resamples}\n")
    return out.getvalue()


def _atomic_write(path, text: str) -> None:
    path = os.fspath(path)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_csv(result: SweepResult, path) -> None:
    """One row per sweep point in grid order, then a ``#`` provenance line."""
    if not result.points:
        raise ValueError("refusing to write an empty sweep")
    _atomic_write(path, csv_text(result))


def plot_svg(result: SweepResult, metric: str) -> str:
    if metric not in PLOT_METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {', '.join(PLOT_METRICS)}")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    norm_attr, ci_attr, mean_attr, ylabel = PLOT_METRICS[metric]
    alphas = sorted({p.alpha for p in result.points})
    schemes = list(dict.fromkeys(p.scheme for p in result.points))
    with matplotlib.rc_context({"svg.hashsalt": "convergesim", "svg.fonttype": "none"}):
        fig, axes = plt.subplots(1, len(alphas), figsize=(5.0 * len(alphas), 4.0), squeeze=False)
        for ax, alpha in zip(axes[0], alphas):
            ax.set_gid(f"chart-alpha-{alpha:g}")
            for scheme in schemes:
                curve = result.curve(scheme, alpha)
                xs = [p.lambda_norm for p in curve]
                ys = [getattr(p, norm_attr) for p in curve]
                # CI half-width expressed in normalised units
                scale = [getattr(p, norm_attr) / getattr(p, mean_attr) if getattr(p, mean_attr) else 0.0
                         for p in curve]
                err = [getattr(p, ci_attr) * s if not math.isnan(getattr(p, ci_attr)) else 0.0
                       for p, s in zip(curve, scale)]
                ax.errorbar(xs, ys, yerr=err, marker="o", capsize=3, label=scheme, gid=f"curve-{scheme}")
            ax.set_xscale("log", base=2)
            ax.set_xlabel("Normalized user intensity")
            ax.set_ylabel(ylabel)
            ax.set_title(f"alpha = {alpha:g}")
            ax.grid(True, alpha=0.3)
            ax.legend()
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()


def write_plot(result: SweepResult, metric: str, path) -> None:
    _atomic_write(path, plot_svg(result, metric))


def write_traces(traces: Iterable[tuple[str, OptimizerTrace]], path) -> None:
    """Concatenate optimiser trace tables, each headed by ``# label``."""
    parts = [f"# {label}\n{trace.to_table()}" for label, trace in traces]
    _atomic_write(path, "".join(parts))
