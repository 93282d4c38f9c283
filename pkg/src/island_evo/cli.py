"""Command line front end: simulate, oracle, verify, fit.

Thread count resolution: the ISLAND_EVO_THREADS environment variable,
when set, overrides --threads. Results never depend on the thread
count; it only sizes the worker pool.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import __version__
from .analytic import (
    build_chain,
    choose_sum_div,
    exact_lo_runtime,
    expected_hitting_time,
    hitting_probability,
    lo_block_runtime,
)
from .fitness import build_fitness
from .harness import FIT_FIELDS, fit_exponent, load_scenarios, run_scenario, write_csv


def _resolve_threads(arg_value: int) -> int:
    env = os.environ.get("ISLAND_EVO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"ISLAND_EVO_THREADS must be an integer, got {env!r}")
    return max(1, arg_value)


def _cmd_simulate(args) -> int:
    threads = _resolve_threads(args.threads)
    with open(args.config) as fp:
        scenarios = load_scenarios(fp.read())
    progress = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    rows = []
    for scenario in scenarios:
        rows.extend(run_scenario(scenario, threads=threads, progress=progress))
    if args.out:
        with open(args.out, "w", newline="") as fp:
            write_csv(rows, fp)
        if progress is not None:
            progress(f"wrote {len(rows)} rows to {args.out}")
    else:
        write_csv(rows, sys.stdout)
    return 0


def _spec_fitness(args):
    spec = json.loads(args.fitness)
    if not isinstance(spec, dict):
        raise ValueError("--fitness must be a JSON object")
    return build_fitness(spec, n=args.n)


def _cmd_oracle(args) -> int:
    cmd = args.oracle_command
    if cmd == "lo-runtime":
        print(f"lo_runtime(n={args.n}) = {exact_lo_runtime(args.n)!r}")
    elif cmd == "hitting-time":
        fn = _spec_fitness(args)
        n_mut = args.n_mut or fn.n
        value = expected_hitting_time(build_chain(fn, n_mut))
        print(f"hitting_time[{fn.label()}, n={fn.n}, n_mut={n_mut}] = {value!r}")
    elif cmd == "hitting-prob":
        fn = _spec_fitness(args)
        wit = fn.optimum()
        if not fn.has_valley or wit.valley is None:
            raise ValueError(f"{fn.label()} has no valley state to race the optimum")
        n_mut = args.n_mut or fn.n
        p = hitting_probability(build_chain(fn, n_mut), wit.valley, wit.optimum)
        print(f"hitting_prob[{fn.label()}, n={fn.n}, valley first] = {p!r}")
    elif cmd == "lo-block":
        value = lo_block_runtime(args.n, args.k, args.inner_expected)
        print(
            f"lo_block(n={args.n}, k={args.k},"
            f" inner_expected={args.inner_expected!r}) = {value!r}"
        )
    else:  # choose-sum
        print(f"choose_sum_div(n={args.n}) = {choose_sum_div(args.n)!r}")
    return 0


def _cmd_verify(args) -> int:
    from .acceptance import verify_all

    threads = _resolve_threads(args.threads)
    only = None
    if args.only:
        only = [part.strip().upper() for part in args.only.split(",") if part.strip()]
    report, ok = verify_all(
        out_path=args.out,
        threads=threads,
        progress=lambda msg: print(msg, file=sys.stderr),
        only=only,
    )
    if ok:
        print("all criteria passed")
    else:
        failed = [c["cid"] for c in report["criteria"] if not c["passed"]]
        print("FAILED: " + ", ".join(failed))
    return 0 if ok else 1


def _cmd_fit(args) -> int:
    column = FIT_FIELDS[args.field]
    with open(args.csv, newline="") as fp:
        rows = list(csv.DictReader(fp))
    if not rows:
        raise ValueError(f"{args.csv}: no data rows")
    groups: dict[str, list[dict]] = {}
    for row in rows:
        groups.setdefault(row["scenario"], []).append(row)
    fitted = 0
    for name, group in groups.items():
        ns = [int(row["n"]) for row in group]
        vals = [float(row[column]) if row[column] else None for row in group]
        try:
            f = fit_exponent(ns, vals)
        except ValueError as e:
            print(f"{name}: {e}", file=sys.stderr)
            continue
        print(
            f"{name}: {args.field} ~ n^{f.slope:.3f}"
            f" (stderr {f.slope_stderr:.3f}, R^2 {f.r_squared:.4f}, points {f.points})"
        )
        fitted += 1
    return 0 if fitted else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="island-evo",
        description="Island-model EA simulator and exact analysis on fork landscapes.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run scenarios from a JSON config, emit CSV")
    sim.add_argument("--config", required=True, metavar="FILE.json")
    sim.add_argument("--threads", type=int, default=1)
    sim.add_argument("--out", metavar="FILE.csv", help="output path (default stdout)")
    sim.add_argument("--quiet", action="store_true", help="suppress progress lines")
    sim.set_defaults(func=_cmd_simulate)

    orc = sub.add_parser("oracle", help="print exact quantities as labeled decimals")
    osub = orc.add_subparsers(dest="oracle_command", required=True)

    o_lo = osub.add_parser("lo-runtime", help="closed-form LeadingOnes runtime")
    o_lo.add_argument("--n", type=int, required=True)

    for name, help_text in (
        ("hitting-time", "chain expected rounds to reach the optimum"),
        ("hitting-prob", "chain probability the valley precedes the optimum"),
    ):
        o = osub.add_parser(name, help=help_text)
        o.add_argument("--fitness", required=True, help="fitness spec as JSON text")
        o.add_argument("--n", type=int, required=True)
        o.add_argument("--n-mut", type=int, default=None, help="mutation rate 1/n_mut")

    o_lb = osub.add_parser("lo-block", help="block composition runtime formula")
    o_lb.add_argument("--n", type=int, required=True)
    o_lb.add_argument("--k", type=int, required=True)
    o_lb.add_argument("--inner-expected", type=float, required=True)

    o_cs = osub.add_parser("choose-sum", help="normalized binomial jump-wait sum")
    o_cs.add_argument("--n", type=int, required=True)
    orc.set_defaults(func=_cmd_oracle)

    ver = sub.add_parser("verify", help="run the acceptance criteria")
    ver.add_argument("--out", metavar="report.json", help="write a JSON report")
    ver.add_argument("--threads", type=int, default=1)
    ver.add_argument("--only", help="comma-separated criterion ids, e.g. C1,C8")
    ver.set_defaults(func=_cmd_verify)

    fit = sub.add_parser("fit", help="per-scenario log-log exponent fit from a CSV")
    fit.add_argument("--csv", required=True, metavar="FILE.csv")
    fit.add_argument("--field", choices=sorted(FIT_FIELDS), default="evaluations")
    fit.set_defaults(func=_cmd_fit)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
