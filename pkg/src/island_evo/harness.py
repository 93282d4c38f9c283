"""Scenario harness: JSON configs in, versioned CSV out, exponent fits.

A scenario names an algorithm (single_ea, independent_runs, island), a
fitness template, a topology, an n grid, sizing rules for lambda and
tau, a replicate count, a termination mode, and a master seed. Every
replicate's seed derives from (master seed, scenario-name digest, n,
replicate index), so output is byte-identical for any worker count.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from . import fork_engine
from .fitness import FitnessFunction, Fork, build_fitness, spec_params
from .islands import (
    ALL_OPTIMAL,
    ANY_OPTIMAL,
    TERMINATIONS,
    IslandConfig,
    RuntimeStats,
    monte_carlo_runtime,
)
from .rng import mix64, name_digest
from .topology import KINDS, Topology, make_topology

SCHEMA_VERSION = "1"

CSV_COLUMNS = [
    "schema_version",
    "scenario",
    "algorithm",
    "fitness",
    "n",
    "r",
    "k",
    "lambda",
    "tau",
    "topology",
    "termination",
    "replicates",
    "trapped",
    "mean_rounds",
    "stderr_rounds",
    "median_rounds",
    "mean_evals",
    "stderr_evals",
    "mean_migrations",
    "mean_peak_valleys",
    "master_seed",
]

ALGORITHMS = ("single_ea", "independent_runs", "island")

RULE_FORMS = ("constant", "log2", "nlog2", "power", "infinity")


@dataclass(frozen=True)
class Rule:
    """Size rule evaluated at n: constant c; ceil(c*log2 n); ceil(c*n*log2 n);
    ceil(c*n^a); or infinity. An optional floor clamps the result up."""

    form: str
    c: float = 1.0
    a: float = 1.0
    floor: int | None = None

    def resolve(self, n: int) -> int | float:
        if self.form == "infinity":
            return math.inf
        if self.form == "constant":
            val = math.ceil(self.c)
        elif self.form == "log2":
            val = math.ceil(self.c * math.log2(n))
        elif self.form == "nlog2":
            val = math.ceil(self.c * n * math.log2(n))
        else:
            val = math.ceil(self.c * n**self.a)
        if self.floor is not None:
            val = max(self.floor, val)
        return max(1, val)


def parse_rule(obj, what: str) -> Rule:
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return Rule(form="constant", c=obj)
    if not isinstance(obj, dict):
        raise ValueError(f"{what} must be a number or an object")
    obj = dict(obj)
    form = obj.pop("form", None)
    if form not in RULE_FORMS:
        raise ValueError(f"{what}: unknown rule form {form!r}")
    kwargs = {"form": form}
    if "c" in obj:
        kwargs["c"] = float(obj.pop("c"))
    if "a" in obj:
        kwargs["a"] = float(obj.pop("a"))
    if "min" in obj:
        kwargs["floor"] = int(obj.pop("min"))
    if obj:
        raise ValueError(f"{what}: unknown rule fields {sorted(obj)}")
    return Rule(**kwargs)


@dataclass(frozen=True)
class Scenario:
    name: str
    algorithm: str
    fitness: dict
    n_grid: tuple[int, ...]
    replicates: int
    master_seed: int
    topology: str = "isolated"
    lambda_rule: Rule = Rule(form="constant", c=1)
    tau_rule: Rule = Rule(form="infinity")
    termination: str = ANY_OPTIMAL
    cap_rule: Rule | None = None  # None: automatic cap (see resolve_cap)


_SCENARIO_FIELDS = {
    "name",
    "algorithm",
    "fitness",
    "n_grid",
    "replicates",
    "master_seed",
    "topology",
    "lambda_rule",
    "tau_rule",
    "termination",
    "cap_rule",
}


def parse_scenario(obj: dict) -> Scenario:
    if not isinstance(obj, dict):
        raise ValueError("scenario must be an object")
    unknown = set(obj) - _SCENARIO_FIELDS
    if unknown:
        raise ValueError(f"unknown scenario fields: {sorted(unknown)}")
    try:
        name = obj["name"]
        algorithm = obj["algorithm"]
        fitness = obj["fitness"]
        n_grid = obj["n_grid"]
        replicates = obj["replicates"]
        master_seed = obj["master_seed"]
    except KeyError as e:
        raise ValueError(f"scenario missing required field {e.args[0]!r}") from None
    if not isinstance(name, str) or not name:
        raise ValueError("scenario name must be a nonempty string")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm: {algorithm!r}")
    if not isinstance(fitness, dict):
        raise ValueError("fitness must be an object")
    if (
        not isinstance(n_grid, list)
        or not n_grid
        or not all(isinstance(n, int) and n >= 1 for n in n_grid)
    ):
        raise ValueError("n_grid must be a nonempty list of positive ints")
    if not isinstance(replicates, int) or replicates < 1:
        raise ValueError("replicates must be a positive int")
    if not isinstance(master_seed, int):
        raise ValueError("master_seed must be an int")
    topology = obj.get("topology", "isolated")
    if topology not in KINDS:
        raise ValueError(f"unknown topology kind: {topology!r}")
    termination = obj.get("termination", ANY_OPTIMAL)
    if termination not in TERMINATIONS:
        raise ValueError(f"unknown termination mode: {termination!r}")
    cap_rule = obj.get("cap_rule")
    return Scenario(
        name=name,
        algorithm=algorithm,
        fitness=fitness,
        n_grid=tuple(n_grid),
        replicates=replicates,
        master_seed=master_seed,
        topology=topology,
        lambda_rule=parse_rule(obj.get("lambda_rule", 1), "lambda_rule"),
        tau_rule=parse_rule(obj.get("tau_rule", {"form": "infinity"}), "tau_rule"),
        termination=termination,
        cap_rule=None if cap_rule is None else parse_rule(cap_rule, "cap_rule"),
    )


def load_scenarios(text: str) -> list[Scenario]:
    import json

    data = json.loads(text)
    if isinstance(data, dict):
        data = [data]
    if not isinstance(data, list) or not data:
        raise ValueError("config must be a scenario object or a nonempty list of them")
    scenarios = [parse_scenario(o) for o in data]
    names = [s.name for s in scenarios]
    if len(set(names)) != len(names):
        raise ValueError("scenario names must be unique")
    return scenarios


def resolve_cap(scenario: Scenario, fn: FitnessFunction, n: int, lam: int) -> int:
    """Round cap for one grid cell.

    Default is 50 * (n^(2r)/lambda + n^(2r)) for fork-family specs (a
    generous multiple of the worst expected valley escape) and
    1000 * n^2 + 10000 otherwise; a cap_rule overrides.
    """
    if scenario.cap_rule is not None:
        cap = scenario.cap_rule.resolve(n)
        return None if cap == math.inf else int(cap)
    r, _ = spec_params(fn)
    if r is not None:
        guess = n ** (2 * r)
        return 50 * (math.ceil(guess / lam) + guess)
    return 1000 * n * n + 10_000


@dataclass
class ResultRow:
    scenario: str
    algorithm: str
    fitness: str
    n: int
    r: int | None
    k: int | None
    lam: int
    tau: float
    topology: str
    termination: str
    replicates: int
    trapped: int
    mean_rounds: float | None
    stderr_rounds: float | None
    median_rounds: float | None
    mean_evals: float | None
    stderr_evals: float | None
    mean_migrations: float | None
    mean_peak_valleys: float | None
    master_seed: int

    def csv_fields(self) -> list[str]:
        def num(x) -> str:
            if x is None:
                return ""
            if isinstance(x, float):
                return "inf" if x == math.inf else repr(x)
            return str(x)

        return [
            SCHEMA_VERSION,
            self.scenario,
            self.algorithm,
            self.fitness,
            str(self.n),
            num(self.r),
            num(self.k),
            str(self.lam),
            num(self.tau),
            self.topology,
            self.termination,
            str(self.replicates),
            str(self.trapped),
            num(self.mean_rounds),
            num(self.stderr_rounds),
            num(self.median_rounds),
            num(self.mean_evals),
            num(self.stderr_evals),
            num(self.mean_migrations),
            num(self.mean_peak_valleys),
            str(self.master_seed),
        ]


def scenario_cell(
    scenario: Scenario, n: int, threads: int = 1
) -> tuple[ResultRow, RuntimeStats]:
    """Run one (scenario, n) cell and summarize it as a CSV row."""
    fn = build_fitness(scenario.fitness, n=n)
    if scenario.algorithm == "single_ea":
        lam = 1
        topo_kind = "isolated"
    else:
        lam = int(scenario.lambda_rule.resolve(n))
        topo_kind = (
            "isolated" if scenario.algorithm == "independent_runs" else scenario.topology
        )
    topology = make_topology(topo_kind, lam)
    tau = scenario.tau_rule.resolve(n)
    cap = resolve_cap(scenario, fn, n, lam)
    cfg = IslandConfig(
        fitness=fn,
        n_mut=n,
        topology=topology,
        tau=tau,
        termination=scenario.termination,
        cap=cap,
    )
    cell_seed = mix64(scenario.master_seed, name_digest(scenario.name), n)
    stats = monte_carlo_runtime(cfg, scenario.replicates, cell_seed, threads=threads)
    r, k = spec_params(fn)
    row = ResultRow(
        scenario=scenario.name,
        algorithm=scenario.algorithm,
        fitness=fn.label(),
        n=n,
        r=r,
        k=k,
        lam=lam,
        tau=tau,
        topology=topo_kind,
        termination=scenario.termination,
        replicates=scenario.replicates,
        trapped=stats.trapped,
        mean_rounds=stats.mean_rounds,
        stderr_rounds=stats.stderr_rounds,
        median_rounds=stats.median_rounds,
        mean_evals=stats.mean_evals,
        stderr_evals=stats.stderr_evals,
        mean_migrations=stats.mean_migrations,
        mean_peak_valleys=stats.mean_peak_valleys,
        master_seed=scenario.master_seed,
    )
    return row, stats


def run_scenario(
    scenario: Scenario, threads: int = 1, progress=None
) -> list[ResultRow]:
    """All grid cells of one scenario, sequentially, in grid order."""
    rows = []
    for n in scenario.n_grid:
        t0 = time.perf_counter()
        row, stats = scenario_cell(scenario, n, threads=threads)
        if progress is not None:
            dt = time.perf_counter() - t0
            mean = "trapped" if stats.all_trapped else f"{stats.mean_rounds:.1f}"
            progress(
                f"[{scenario.name}] n={n} lambda={row.lam} replicates={scenario.replicates}"
                f" mean_rounds={mean} trapped={stats.trapped} ({dt:.1f}s)"
            )
        if stats.all_trapped and progress is not None:
            progress(f"[{scenario.name}] n={n}: all replicates trapped, row flagged")
        rows.append(row)
    return rows


def write_csv(rows: list[ResultRow], fp) -> None:
    w = csv.writer(fp, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow(row.csv_fields())


def csv_text(rows: list[ResultRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    slope_stderr: float
    r_squared: float
    points: int


def fit_exponent(ns, values) -> ExponentFit:
    """Least squares on (ln n, ln value): slope is the growth exponent.

    Non-positive values are dropped (warning to stderr); fewer than 3
    surviving points is an error.
    """
    ns = list(ns)
    values = list(values)
    pairs = [(n, v) for n, v in zip(ns, values, strict=True) if v is not None and v > 0]
    if len(pairs) < len(ns):
        print("fit_exponent: dropped non-positive or missing values", file=sys.stderr)
    if len(pairs) < 3:
        raise ValueError("need at least 3 positive points for an exponent fit")
    x = np.log([float(n) for n, _ in pairs])
    y = np.log([float(v) for _, v in pairs])
    xbar = x.mean()
    ybar = y.mean()
    dx = x - xbar
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ValueError("all n values identical")
    slope = float(dx @ (y - ybar)) / sxx
    intercept = ybar - slope * xbar
    resid = y - (intercept + slope * x)
    ssr = float(resid @ resid)
    syy = float((y - ybar) @ (y - ybar))
    dof = len(pairs) - 2
    stderr = math.sqrt(ssr / dof / sxx) if dof > 0 else float("nan")
    r2 = 1.0 - ssr / syy if syy > 0 else 1.0
    return ExponentFit(
        slope=slope,
        intercept=intercept,
        slope_stderr=stderr,
        r_squared=r2,
        points=len(pairs),
    )


FIT_FIELDS = {"rounds": "mean_rounds", "evaluations": "mean_evals"}


def fit_rows(rows: list[ResultRow], field: str) -> ExponentFit:
    if field not in FIT_FIELDS:
        raise ValueError(f"field must be one of {sorted(FIT_FIELDS)}")
    attr = FIT_FIELDS[field]
    return fit_exponent([r.n for r in rows], [getattr(r, attr) for r in rows])


@dataclass(frozen=True)
class ValleyTestResult:
    replicates: int
    valley_first: int
    fraction: float
    low: float
    high: float
    passed: bool


def wilson_interval(successes: int, trials: int, confidence: float = 0.99) -> tuple[float, float]:
    z = float(norm.ppf(0.5 + confidence / 2.0))
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials))
        / denom
    )
    return center - half, center + half


def valley_first_test(
    n: int,
    r: int,
    replicates: int,
    master_seed: int,
    confidence: float = 0.99,
) -> ValleyTestResult:
    """Fraction of single-EA Fork(n, r) runs whose incumbent visits the
    valley before the optimum; passes iff the Wilson interval covers 1/2.

    By the landscape's reversal symmetry the true fraction is exactly
    1/2, so this is a distribution check on the whole simulation stack.
    """
    if replicates < 1000:
        raise ValueError("need at least 1000 replicates for a meaningful interval")
    fit = Fork(n, r)
    hits = 0
    for i in range(replicates):
        valley, _ = fork_engine.first_special(fit, n, mix64(master_seed, i))
        if valley:
            hits += 1
    low, high = wilson_interval(hits, replicates, confidence)
    return ValleyTestResult(
        replicates=replicates,
        valley_first=hits,
        fraction=hits / replicates,
        low=low,
        high=high,
        passed=low <= 0.5 <= high,
    )


def valley_first_exact(n: int, r: int, n_mut: int | None = None) -> float:
    """Exact probability (dense chain) that the valley precedes the optimum."""
    from .analytic import build_chain, hitting_probability

    fit = Fork(n, r)
    wit = fit.optimum()
    chain = build_chain(fit, n_mut or n)
    return hitting_probability(chain, wit.valley, wit.optimum)
