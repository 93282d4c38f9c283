#!/usr/bin/env python3
"""Static charts from island-evo result files.

Reads the simulate CSV and draws one log-log scaling chart per requested
field (mean rounds or mean total evaluations against n), one curve per
scenario, with each curve's least-squares growth exponent in the legend.
With --report it additionally charts the valley-first fraction recorded
in a verify report against the exact 1/2 line.

The slope annotation is computed exactly like the producer's `fit`
subcommand (centered least squares on natural logs of the CSV values),
and every annotation written into a chart is also printed to stdout.
Output files are deterministic for identical inputs: fixed figure
geometry, Agg backend, no timestamps.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plot-scaling"

import matplotlib.pyplot as plt
import numpy as np

FIELD_COLUMNS = {"rounds": "mean_rounds", "evaluations": "mean_evals"}
DPI = 150


def read_scenarios(path: str) -> dict[str, list[dict]]:
    """CSV rows grouped by scenario name, in file order."""
    with open(path, newline="") as fp:
        reader = csv.DictReader(fp)
        rows = list(reader)
        header = reader.fieldnames or []
    missing = {"scenario", "n", *FIELD_COLUMNS.values()} - set(header)
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    if not rows:
        raise ValueError(f"{path}: no data rows")
    groups: dict[str, list[dict]] = {}
    for row in rows:
        groups.setdefault(row["scenario"], []).append(row)
    return groups


def fit_slope(ns, values) -> float:
    """Centered least squares on (ln n, ln value): the growth exponent.

    Mirrors the producer's fit operation for operation, so the slopes
    printed here agree with `island-evo fit` to float precision.
    """
    pairs = [(n, v) for n, v in zip(ns, values) if v is not None and v > 0]
    if len(pairs) < 2:
        raise ValueError("fewer than 2 positive points")
    x = np.log([float(n) for n, _ in pairs])
    y = np.log([float(v) for _, v in pairs])
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ValueError("all n values identical")
    return float(dx @ (y - y.mean())) / sxx


def prepare_scaling(groups: dict[str, list[dict]], field: str):
    """Fit every curve for one field before anything is rendered.

    Returns (field, curves) where each curve is (points, label); raises
    instead of writing partial output when any scenario is unusable.
    """
    column = FIELD_COLUMNS[field]
    curves = []
    for name, rows in groups.items():
        ns = [int(row["n"]) for row in rows]
        vals = [float(row[column]) if row[column] else None for row in rows]
        pts = [(n, v) for n, v in zip(ns, vals) if v is not None and v > 0]
        if len({n for n, _ in pts}) < 2:
            raise ValueError(f"scenario {name!r}: fewer than 2 usable n values")
        # 10 significant digits keep the displayed slope within 1e-9 of
        # the fitted float for any exponent below 10.
        label = f"{name}: slope {fit_slope(ns, vals):.10g}"
        curves.append((pts, label))
    return field, curves


def render_scaling(chart, out_dir: Path, fmt: str) -> Path:
    field, curves = chart
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for pts, label in curves:
        ax.loglog([n for n, _ in pts], [v for _, v in pts], marker="o", label=label)
    ax.set_xlabel("n")
    ax.set_ylabel(f"mean {field}")
    ax.set_title(f"mean {field} vs n")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    path = out_dir / f"scaling_{field}.{fmt}"
    _save(fig, path, fmt)
    return path


def prepare_fraction(report_path: str):
    """Valley-first fraction and its interval from a verify report."""
    with open(report_path) as fp:
        report = json.load(fp)
    criteria = report.get("criteria") if isinstance(report, dict) else None
    if not isinstance(criteria, list):
        raise ValueError(f"{report_path}: not a verify report")
    entry = next((c for c in criteria if c.get("cid") == "C3"), None)
    if entry is None:
        raise ValueError(f"{report_path}: no valley-race criterion (C3) in report")
    m = entry["measured"]
    return float(m["mc_fraction"]), m["mc_interval"], int(m["mc_replicates"])


def render_fraction(fraction, out_dir: Path, fmt: str) -> Path:
    frac, (low, high), replicates = fraction
    fig, ax = plt.subplots(figsize=(4.0, 4.8))
    ax.axhline(0.5, linestyle="--", color="grey", label="exact 1/2")
    ax.errorbar(
        [0.0],
        [frac],
        yerr=[[frac - low], [high - frac]],
        fmt="o",
        capsize=6,
        label=f"measured, {replicates} runs (99% interval)",
    )
    ax.set_xlim(-1.0, 1.0)
    ax.set_xticks([])
    ax.set_ylabel("valley-first fraction")
    ax.set_title("valley before optimum")
    ax.legend()
    path = out_dir / f"valley_fraction.{fmt}"
    _save(fig, path, fmt)
    return path


def _save(fig, path: Path, fmt: str) -> None:
    # SVG would embed a creation date; dropping it (plus the fixed hash
    # salt set at import) keeps identical inputs byte-identical. PNG has
    # no timestamp to begin with.
    meta = {"Date": None} if fmt == "svg" else None
    fig.savefig(path, dpi=DPI, metadata=meta)
    plt.close(fig)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plot_scaling.py",
        description="Log-log scaling charts from an island-evo results CSV.",
    )
    p.add_argument("--csv", required=True, metavar="FILE.csv")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument(
        "--field",
        action="append",
        choices=sorted(FIELD_COLUMNS),
        help="field to chart, repeatable (default: evaluations)",
    )
    p.add_argument(
        "--scenarios",
        metavar="NAMES",
        help="comma-separated scenario filter (default: every scenario in the CSV)",
    )
    p.add_argument("--format", choices=("png", "svg"), default="png")
    p.add_argument(
        "--report",
        metavar="REPORT.json",
        help="verify report to chart the valley-first fraction from",
    )
    return p


def run(args) -> int:
    fields = list(dict.fromkeys(args.field or ["evaluations"]))
    groups = read_scenarios(args.csv)
    if args.scenarios is not None:
        wanted = [s.strip() for s in args.scenarios.split(",") if s.strip()]
        if not wanted:
            raise ValueError("empty scenario filter")
        missing = [s for s in wanted if s not in groups]
        if missing:
            raise ValueError(f"no such scenarios: {', '.join(missing)}")
        groups = {name: groups[name] for name in wanted}
    # Validate everything first so a bad field or report writes no files.
    charts = [prepare_scaling(groups, field) for field in fields]
    fraction = prepare_fraction(args.report) if args.report else None
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for chart in charts:
        path = render_scaling(chart, out_dir, args.format)
        print(f"wrote {path}")
        for _, label in chart[1]:
            print(f"  {label}")
    if fraction is not None:
        path = render_fraction(fraction, out_dir, args.format)
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
