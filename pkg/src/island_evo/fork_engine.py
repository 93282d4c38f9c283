"""Event-driven runner for plain-Fork island runs.

On Fork, once an island's incumbent is one of 1^n, the valley, or the
optimum, the only accepted moves are exact jumps: from 1^n the offspring
changes the incumbent only by flipping exactly the first r bits (to the
valley) or exactly the last r bits (to the optimum), each with
probability q = (1/n_mut)^r (1-1/n_mut)^(n-r) per round, and from the
valley only the exact 2r-bit jump to the optimum works, with probability
(1/n_mut)^(2r) (1-1/n_mut)^(n-2r). Waiting times are therefore geometric
and the destination from 1^n is a fair coin, so instead of sampling
every round the engine advances the clock to the next jump or migration
event. By memorylessness, discarding unexpired waits and resampling
after each event leaves the process distribution-identical to the
round-by-round loop; rounds in which nothing can change are merely
skipped. Unsettled (climbing) phases are simulated round by round with
the ordinary IslandRun machinery, so all counters keep their exact
per-round semantics.
"""

from __future__ import annotations

import math
from random import Random

from .ea import ea_run
from .fitness import FitnessFunction, Fork
from .islands import IslandConfig, IslandRun, RunRecord, island_stream_seeds


def supports(fitness: FitnessFunction) -> bool:
    """The event engine handles exactly the plain Fork function."""
    return type(fitness) is Fork


def _geometric(p: float, rng: Random) -> int | float:
    """Rounds until the first success, support {1, 2, ...}; inf for p <= 0."""
    if p <= 0.0:
        return math.inf
    if p >= 1.0:
        return 1
    g = math.ceil(math.log(1.0 - rng.random()) / math.log1p(-p))
    return g if g >= 1 else 1


def _jump_probs(n: int, r: int, n_mut: int) -> tuple[float, float]:
    p = 1.0 / n_mut
    q = p**r * (1.0 - p) ** (n - r)
    p_escape = p ** (2 * r) * (1.0 - p) ** (n - 2 * r)
    return q, p_escape


def run_event(cfg: IslandConfig, rep_seed: int) -> RunRecord:
    """Drop-in replacement for island_run, valid for plain Fork only."""
    fit = cfg.fitness
    if not supports(fit):
        raise ValueError("event engine supports plain fork fitness only")
    assert isinstance(fit, Fork)
    run = IslandRun(cfg, rep_seed)
    cap = math.inf if cfg.cap is None else cfg.cap
    n = fit.n
    wit = fit.optimum()
    ones_w = (1 << n) - 1
    valley_w = wit.valley
    opt_w = wit.optimum
    settled = (ones_w, valley_w, opt_w)

    words = run.words
    while not run.terminated and run.t < cap:
        if all(w in settled for w in words):
            break
        run.step()
    if run.terminated or run.t >= cap:
        return run.record()

    q, p_escape = _jump_probs(n, fit.r, cfg.n_mut)
    p_leave_ones = 2.0 * q
    fvals = run.fvals
    rngs = run.rngs
    opt_value = run.opt_value
    valley_value = wit.valley_value

    while not run.terminated:
        wait: int | float = math.inf
        jumpers: list[int] = []
        for j, w in enumerate(words):
            if w == ones_w:
                pj = p_leave_ones
            elif w == valley_w:
                pj = p_escape
            else:
                continue
            g = _geometric(pj, rngs[j])
            if g == math.inf:
                continue
            if g < wait:
                wait = g
                jumpers = [j]
            elif g == wait:
                jumpers.append(j)
        mig_wait: int | float = math.inf
        if run.can_migrate:
            mig_wait = _geometric(run.migration_prob, run.coin_rng)
        event = min(wait, mig_wait)
        if event == math.inf:
            # Nothing can ever change again (e.g. n_mut degenerate).
            if cap == math.inf:
                raise RuntimeError("run cannot progress and has no cap")
            run.t = int(cap)
            break
        if run.t + event > cap:
            run.t = int(cap)
            break
        run.t += event
        if wait == event:
            for j in jumpers:
                if words[j] == ones_w and rngs[j].random() < 0.5:
                    words[j] = valley_w
                    fvals[j] = valley_value
                else:
                    words[j] = opt_w
                    fvals[j] = opt_value
        migrated = mig_wait == event
        if migrated:
            run._migrate()
        run._post_round(migrated)
    return run.record()


def first_special(fit: Fork, n_mut: int, rep_seed: int) -> tuple[bool, int]:
    """Whether the valley becomes incumbent before the optimum, and when.

    Runs a single (1+1) EA (the replicate's island-0 stream) until the
    incumbent is 1^n, the valley, or the optimum. A run sitting at 1^n
    is finished with one geometric wait plus the fair destination coin,
    which is the exact conditional law of its first special incumbent.
    """
    n = fit.n
    wit = fit.optimum()
    ones_w = (1 << n) - 1
    island_seeds, _ = island_stream_seeds(rep_seed, 1)
    rng = Random(island_seeds[0])
    res = ea_run(fit, n_mut, rng, stop_words={ones_w, wit.valley, wit.optimum})
    if res.word == wit.valley:
        return True, res.rounds
    if res.word == wit.optimum:
        return False, res.rounds
    q, _ = _jump_probs(n, fit.r, n_mut)
    g = _geometric(2.0 * q, rng)
    if g == math.inf:
        raise RuntimeError("no special string reachable with this n_mut")
    return rng.random() < 0.5, res.rounds + int(g)
