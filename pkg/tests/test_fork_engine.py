"""Event-driven fork runner against the round-by-round loop and exact values.

The event engine must be distribution-identical to the plain loop, so
these tests compare both engines (and the dense chain) on the same
configurations with independent seeds and generous z-score tolerances.
All seeds are fixed; a pass is reproducible.
"""

import math
from statistics import fmean, stdev

import pytest

from island_evo.analytic import build_chain, expected_hitting_time
from island_evo.fitness import Fork, OneMax, masked_fork
from island_evo.fork_engine import _geometric, first_special, run_event, supports
from island_evo.islands import (
    ALL_OPTIMAL,
    IslandConfig,
    monte_carlo_runtime,
)
from island_evo.rng import mix64
from island_evo.topology import make_topology
from island_evo.harness import wilson_interval
from random import Random


def test_supports_only_plain_fork():
    assert supports(Fork(6, 2))
    assert not supports(masked_fork(6, 2))
    assert not supports(OneMax(6))


def test_run_event_rejects_other_fitness():
    cfg = IslandConfig(
        fitness=OneMax(4),
        n_mut=4,
        topology=make_topology("isolated", 1),
        tau=math.inf,
    )
    with pytest.raises(ValueError):
        run_event(cfg, 1)


def test_geometric_matches_closed_form_mean():
    rng = Random(31337)
    p = 0.02
    draws = 200_000
    vals = [_geometric(p, rng) for _ in range(draws)]
    mean = fmean(vals)
    # Geometric mean 1/p = 50, stdev ~ sqrt(1-p)/p ~ 49.5.
    assert abs(mean - 50.0) < 5 * 49.5 / math.sqrt(draws)
    assert min(vals) >= 1
    assert _geometric(0.0, rng) == math.inf
    assert _geometric(1.0, rng) == 1


def _cfg(fit, lam=1, kind="isolated", tau=math.inf, termination="any_optimal", cap=10**9):
    return IslandConfig(
        fitness=fit,
        n_mut=fit.n,
        topology=make_topology(kind, lam),
        tau=tau,
        termination=termination,
        cap=cap,
    )


def test_single_island_both_engines_match_chain():
    fit = Fork(4, 2)
    exact = expected_hitting_time(build_chain(fit, 4))
    cfg = _cfg(fit)
    for engine, reps, seed in (("event", 20_000, 101), ("round", 6_000, 202)):
        stats = monte_carlo_runtime(cfg, reps, seed, engine=engine)
        assert stats.trapped == 0
        z = abs(stats.mean_rounds - exact) / stats.stderr_rounds
        assert z < 4.0, f"{engine}: mean {stats.mean_rounds} vs exact {exact}, z={z}"


def test_island_runs_agree_across_engines():
    # Ring with migration: the event engine enumerates the same law for
    # jump waits, migration rounds, and valley peaks as the plain loop.
    fit = Fork(4, 2)
    cfg = _cfg(fit, lam=3, kind="ring", tau=8, termination=ALL_OPTIMAL)
    ev = monte_carlo_runtime(cfg, 4_000, 11, engine="event")
    rd = monte_carlo_runtime(cfg, 4_000, 22, engine="round")
    assert ev.trapped == rd.trapped == 0
    se = math.hypot(ev.stderr_rounds, rd.stderr_rounds)
    assert abs(ev.mean_rounds - rd.mean_rounds) < 4 * se
    # Migration count tracks rounds/tau, so reuse the rounds stderr.
    mig_se = se / 8
    assert abs(ev.mean_migrations - rd.mean_migrations) < 4 * mig_se + 0.5
    assert abs(ev.mean_peak_valleys - rd.mean_peak_valleys) < 0.08
    assert (
        abs(ev.mean_migration_peak_valleys - rd.mean_migration_peak_valleys) < 0.08
    )
    assert abs(ev.mean_peak_valley_takeover - rd.mean_peak_valley_takeover) < 0.08


def test_event_engine_respects_cap():
    # Lucky direct jumps can finish even at n = 10, but a replicate that
    # misses must stop exactly at the cap, and most replicates miss.
    fit = Fork(10, 2)
    cfg = _cfg(fit, cap=20)
    trapped = 0
    for i in range(200):
        rec = run_event(cfg, mix64(5, i))
        assert rec.rounds <= 20
        if not rec.hit:
            assert rec.rounds == 20
            trapped += 1
    assert trapped > 150
    stats = monte_carlo_runtime(cfg, 200, 5, engine="event")
    assert stats.trapped == trapped


def test_event_engine_per_replicate_rounds_are_ints():
    fit = Fork(5, 2)
    cfg = _cfg(fit)
    stats = monte_carlo_runtime(cfg, 500, 77, engine="event")
    assert all(isinstance(r, int) for r in stats.rounds)
    assert stats.trapped == 0


def test_first_special_fraction_covers_half():
    fit = Fork(6, 2)
    hits = 0
    reps = 3_000
    for i in range(reps):
        valley_first, rounds = first_special(fit, 6, mix64(404, i))
        hits += valley_first
        assert rounds >= 0
    low, high = wilson_interval(hits, reps, 0.99)
    assert low <= 0.5 <= high


def test_first_special_reproducible():
    fit = Fork(6, 2)
    assert first_special(fit, 6, 12345) == first_special(fit, 6, 12345)
