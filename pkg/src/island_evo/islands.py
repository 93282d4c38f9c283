"""Lockstep island model: lambda (1+1) EAs with periodic migration.

Each round every island mutates and selects independently, then one
global coin decides (with probability 1/tau) whether a migration
exchange happens. Migration is two-phase: all islands first snapshot
the post-selection incumbents, then each island looks at its neighbors'
snapshots, picks a uniformly random member of the max-fitness subset
(ties broken by the island's own stream, candidates in ascending island
order) and adopts it iff it is not worse than its own incumbent, so the
outcome is independent of island processing order and a migrant wins
fitness ties. Migrants carry their memoized fitness; migration costs no
evaluations. Total evaluations equal n_islands * rounds, plus the
n_islands initial evaluations reported separately.

Randomness: a run's replicate seed expands into one stream per island
plus one stream for the migration coin (see island_stream_seeds). With
tau = inf, or when the topology has no edges, the coin is never
sampled, so island trajectories match independent single-EA runs driven
by the same island streams.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from multiprocessing import Pool
from random import Random

from .ea import Mutator
from .fitness import FitnessFunction
from .rng import TAG_COIN, TAG_ISLAND, mix64
from .topology import Topology

ANY_OPTIMAL = "any_optimal"
ALL_OPTIMAL = "all_optimal"
TERMINATIONS = (ANY_OPTIMAL, ALL_OPTIMAL)


@dataclass(frozen=True)
class IslandConfig:
    fitness: FitnessFunction
    n_mut: int
    topology: Topology
    tau: float  # migration period (>= 1) or math.inf for never
    termination: str = ANY_OPTIMAL
    cap: int | None = None  # max rounds; None means unbounded

    def __post_init__(self):
        if self.termination not in TERMINATIONS:
            raise ValueError(f"unknown termination mode: {self.termination!r}")
        if self.n_mut < 1:
            raise ValueError("n_mut must be >= 1")
        if not (self.tau == math.inf or (self.tau == int(self.tau) and self.tau >= 1)):
            raise ValueError("tau must be a positive integer or inf")

    @property
    def n_islands(self) -> int:
        return self.topology.n_islands


@dataclass
class RunRecord:
    """Per-run outcome. trapped == not hit (the cap ran out first)."""

    rounds: int
    evaluations: int
    initial_evaluations: int
    hit: bool
    hit_rounds: list[int | None]
    migration_rounds: list[int]
    peak_valley_count: int
    # Same count, but sampled only right after migration exchanges.
    migration_peak_valley_count: int
    # Most islands a single exchange newly pushed into the valley
    # (post-exchange count minus pre-exchange count, maximized over the
    # run). Separates migration-driven takeover from islands that merely
    # drifted into the valley on their own between exchanges.
    peak_valley_takeover: int
    valley_visited: list[bool]

    @property
    def trapped(self) -> bool:
        return not self.hit


def island_stream_seeds(rep_seed: int, n_islands: int) -> tuple[list[int], int]:
    """Per-island stream seeds plus the migration coin stream seed."""
    island_seeds = [mix64(rep_seed, TAG_ISLAND, j) for j in range(n_islands)]
    return island_seeds, mix64(rep_seed, TAG_COIN)


def apply_migration(
    words: list[int],
    fvals: list[int],
    topology: Topology,
    rngs: list[Random],
) -> None:
    """One migration exchange over post-selection incumbents, in place."""
    snap_w = words[:]
    snap_f = fvals[:]
    for j, nbrs in enumerate(topology.neighbors):
        if not nbrs:
            continue
        best = None
        cands: list[int] = []
        for i in nbrs:  # ascending island order
            fi = snap_f[i]
            if best is None or fi > best:
                best = fi
                cands = [i]
            elif fi == best:
                cands.append(i)
        if best is None or best < fvals[j]:
            continue
        pick = cands[0] if len(cands) == 1 else cands[rngs[j].randrange(len(cands))]
        words[j] = snap_w[pick]
        fvals[j] = snap_f[pick]


class IslandRun:
    """Mutable state of one island-model run, advanced round by round."""

    def __init__(self, cfg: IslandConfig, rep_seed: int):
        self.cfg = cfg
        lam = cfg.n_islands
        island_seeds, coin_seed = island_stream_seeds(rep_seed, lam)
        self.rngs = [Random(s) for s in island_seeds]
        self.coin_rng = Random(coin_seed)
        fit = cfg.fitness
        n = fit.n
        self.evaluate = fit.evaluate
        self.mutator = Mutator(n, cfg.n_mut)
        self.words = [rng.getrandbits(n) for rng in self.rngs]
        self.fvals = [self.evaluate(w) for w in self.words]
        wit = fit.optimum()
        self.opt_value = wit.value
        self.t = 0
        self.migration_rounds: list[int] = []
        self.hit_rounds: list[int | None] = [None] * lam
        self.n_opt = 0
        self.valley_fn = fit.is_valley if fit.has_valley else None
        self.peak_valley_count = 0
        self.migration_peak_valley_count = 0
        self.peak_valley_takeover = 0
        self.valley_visited = [False] * lam
        # The coin is only sampled when an exchange could act on someone.
        self.migration_prob = 0.0 if cfg.tau == math.inf else 1.0 / cfg.tau
        self.can_migrate = self.migration_prob > 0.0 and cfg.topology.has_edges
        self.terminated = False
        self._post_round()

    def _post_round(self, migrated: bool = False) -> None:
        fvals = self.fvals
        opt_value = self.opt_value
        t = self.t
        hit_rounds = self.hit_rounds
        for j, fv in enumerate(fvals):
            if fv == opt_value and hit_rounds[j] is None:
                hit_rounds[j] = t
                self.n_opt += 1
        if self.valley_fn is not None:
            count = 0
            valley_fn = self.valley_fn
            visited = self.valley_visited
            for j, w in enumerate(self.words):
                if valley_fn(w):
                    count += 1
                    visited[j] = True
            if count > self.peak_valley_count:
                self.peak_valley_count = count
            if migrated and count > self.migration_peak_valley_count:
                self.migration_peak_valley_count = count
        lam = len(fvals)
        self.terminated = (
            self.n_opt >= lam
            if self.cfg.termination == ALL_OPTIMAL
            else self.n_opt > 0
        )

    def _count_valleys(self) -> int:
        valley_fn = self.valley_fn
        return sum(1 for w in self.words if valley_fn(w))

    def _migrate(self) -> None:
        """One exchange at the current round, with takeover bookkeeping."""
        self.migration_rounds.append(self.t)
        if self.valley_fn is None:
            apply_migration(self.words, self.fvals, self.cfg.topology, self.rngs)
            return
        pre = self._count_valleys()
        apply_migration(self.words, self.fvals, self.cfg.topology, self.rngs)
        gain = self._count_valleys() - pre
        if gain > self.peak_valley_takeover:
            self.peak_valley_takeover = gain

    def step(self) -> None:
        """One full round: mutation/selection on every island, then maybe migration."""
        self.t += 1
        words = self.words
        fvals = self.fvals
        rngs = self.rngs
        mutator = self.mutator
        evaluate = self.evaluate
        for j in range(len(words)):
            y = mutator(words[j], rngs[j])
            fy = evaluate(y)
            if fy >= fvals[j]:
                words[j] = y
                fvals[j] = fy
        migrated = self.can_migrate and self.coin_rng.random() < self.migration_prob
        if migrated:
            self._migrate()
        self._post_round(migrated)

    def record(self) -> RunRecord:
        lam = len(self.words)
        return RunRecord(
            rounds=self.t,
            evaluations=lam * self.t,
            initial_evaluations=lam,
            hit=self.terminated,
            hit_rounds=self.hit_rounds,
            migration_rounds=self.migration_rounds,
            peak_valley_count=self.peak_valley_count,
            migration_peak_valley_count=self.migration_peak_valley_count,
            peak_valley_takeover=self.peak_valley_takeover,
            valley_visited=self.valley_visited,
        )


def island_run(cfg: IslandConfig, rep_seed: int) -> RunRecord:
    """Run one replicate round by round until termination or the cap."""
    run = IslandRun(cfg, rep_seed)
    limit = math.inf if cfg.cap is None else cfg.cap
    while not run.terminated and run.t < limit:
        run.step()
    return run.record()


@dataclass
class RuntimeStats:
    """Monte Carlo summary over replicates; means exclude trapped runs."""

    n_islands: int
    replicates: int
    completed: int
    trapped: int
    mean_rounds: float | None
    stderr_rounds: float | None
    median_rounds: float | None
    quantiles: dict[str, float] = field(default_factory=dict)
    mean_evals: float | None = None
    stderr_evals: float | None = None
    mean_migrations: float | None = None
    mean_peak_valleys: float | None = None
    mean_migration_peak_valleys: float | None = None
    mean_peak_valley_takeover: float | None = None
    rounds: tuple[int, ...] = ()  # completed replicates, in replicate order

    @property
    def all_trapped(self) -> bool:
        return self.completed == 0

    @property
    def evals(self) -> tuple[int, ...]:
        return tuple(r * self.n_islands for r in self.rounds)


def _quantile(sorted_vals: list[int], q: float) -> float:
    # Linear interpolation between order statistics (inclusive method).
    pos = q * (len(sorted_vals) - 1)
    lo = int(pos)
    hi = min(lo + 1, len(sorted_vals) - 1)
    frac = pos - lo
    return sorted_vals[lo] * (1.0 - frac) + sorted_vals[hi] * frac


def _run_one(cfg: IslandConfig, rep_seed: int, engine: str) -> RunRecord:
    if engine == "event":
        from .fork_engine import run_event

        return run_event(cfg, rep_seed)
    return island_run(cfg, rep_seed)


def _mc_worker(args: tuple) -> list[tuple[int, bool, int, int, int, int]]:
    cfg, seed, lo, hi, engine = args
    out = []
    for i in range(lo, hi):
        rec = _run_one(cfg, mix64(seed, i), engine)
        out.append(
            (
                rec.rounds,
                rec.hit,
                len(rec.migration_rounds),
                rec.peak_valley_count,
                rec.migration_peak_valley_count,
                rec.peak_valley_takeover,
            )
        )
    return out


def resolve_engine(cfg: IslandConfig, engine: str) -> str:
    if engine == "auto":
        from .fork_engine import supports

        return "event" if supports(cfg.fitness) else "round"
    if engine not in ("round", "event"):
        raise ValueError(f"unknown engine: {engine!r}")
    return engine


def monte_carlo_runtime(
    cfg: IslandConfig,
    replicates: int,
    seed: int,
    threads: int = 1,
    engine: str = "auto",
) -> RuntimeStats:
    """Replicated runs with derived seeds mix64(seed, replicate_index).

    Replicates are independent, so the result is identical for any
    thread count; threads only split the replicate range over a process
    pool.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    engine = resolve_engine(cfg, engine)
    if threads > 1:
        chunk = max(1, (replicates + 4 * threads - 1) // (4 * threads))
        tasks = [
            (cfg, seed, lo, min(lo + chunk, replicates), engine)
            for lo in range(0, replicates, chunk)
        ]
        with Pool(threads) as pool:
            parts = pool.map(_mc_worker, tasks)
        results = [r for part in parts for r in part]
    else:
        results = _mc_worker((cfg, seed, 0, replicates, engine))

    lam = cfg.n_islands
    done = [row[:1] + row[2:] for row in results if row[1]]
    trapped = replicates - len(done)
    if not done:
        return RuntimeStats(
            n_islands=lam,
            replicates=replicates,
            completed=0,
            trapped=trapped,
            mean_rounds=None,
            stderr_rounds=None,
            median_rounds=None,
        )
    rounds = [d[0] for d in done]
    mean_r = statistics.fmean(rounds)
    stderr_r = (
        statistics.stdev(rounds) / math.sqrt(len(rounds)) if len(rounds) > 1 else None
    )
    srt = sorted(rounds)
    return RuntimeStats(
        n_islands=lam,
        replicates=replicates,
        completed=len(done),
        trapped=trapped,
        mean_rounds=mean_r,
        stderr_rounds=stderr_r,
        median_rounds=_quantile(srt, 0.5),
        quantiles={f"q{int(100 * q)}": _quantile(srt, q) for q in (0.1, 0.25, 0.5, 0.75, 0.9)},
        mean_evals=lam * mean_r,
        stderr_evals=None if stderr_r is None else lam * stderr_r,
        mean_migrations=statistics.fmean(d[1] for d in done),
        mean_peak_valleys=statistics.fmean(d[2] for d in done),
        mean_migration_peak_valleys=statistics.fmean(d[3] for d in done),
        mean_peak_valley_takeover=statistics.fmean(d[4] for d in done),
        rounds=tuple(rounds),
    )
