"""Benchmark report writers: delimited tables and summary figures."""

from __future__ import annotations

import csv
import json

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .bench import BenchResult

__all__ = ["CSV_COLUMNS", "emit_report", "load_json_report", "render_figure"]

CSV_COLUMNS = (
    "method",
    "m",
    "n_signals",
    "median_error",
    "q1_error",
    "q3_error",
    "failures",
    "wall_time_s",
    "seed",
)


def emit_report(result: BenchResult, path, fmt: str = "csv") -> None:
    """Write one row per (method, m) cell.

    CSV carries the row table only (floats via repr, so infinities appear as
    ``inf``); JSON additionally embeds the config and round-trips through
    ``load_json_report``.
    """
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in result.rows:
                cells = [getattr(row, column) for column in CSV_COLUMNS]
                writer.writerow(
                    [repr(c) if isinstance(c, float) else c for c in cells]
                )
    elif fmt == "json":
        payload = result.to_dict()
        payload["sampling_policy"] = (
            "random methods redraw the sample set for every signal; "
            "dpp-approx and dpp-ideal reuse one set per size"
        )
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"unsupported report format {fmt!r}")


def load_json_report(path) -> BenchResult:
    with open(path, "r", encoding="utf-8") as fh:
        return BenchResult.from_dict(json.load(fh))


def render_figure(result: BenchResult, path) -> None:
    """Plot median error against sample size, one curve per method.

    Methods evaluated at a single size are drawn as horizontal reference
    lines. Infinite medians (all-failed cells) leave gaps. Quartile bands are
    shaded where finite.
    """
    import numpy as np

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    by_method: dict[str, list] = {}
    for row in result.rows:
        by_method.setdefault(row.method, []).append(row)
    for method, rows in by_method.items():
        rows.sort(key=lambda r: r.m)
        ms = np.array([r.m for r in rows], dtype=float)
        med = np.array([r.median_error for r in rows])
        med = np.where(np.isfinite(med), med, np.nan)
        if len(rows) == 1:
            ax.axhline(
                med[0], linestyle="--", linewidth=1.2,
                label=f"{method} (m={rows[0].m})",
            )
            continue
        q1 = np.where(
            np.isfinite([r.q1_error for r in rows]), [r.q1_error for r in rows], np.nan
        )
        q3 = np.where(
            np.isfinite([r.q3_error for r in rows]), [r.q3_error for r in rows], np.nan
        )
        line, = ax.plot(ms, med, marker="o", markersize=4, label=method)
        ax.fill_between(ms, q1, q3, alpha=0.15, color=line.get_color())
    ax.set_yscale("log")
    ax.set_xlabel("number of sampled nodes m")
    ax.set_ylabel("median reconstruction error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
