"""(1+1) evolutionary algorithm with standard bit mutation.

The round counter t equals the number of offspring evaluations. The
initial individual's evaluation is never counted in t; callers that
report evaluation budgets account for it separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random

from .fitness import FitnessFunction


class Mutator:
    """Flip each of n bits independently with probability 1/n_mut.

    Sampling walks the flip positions with geometric gaps, drawing
    O(1 + n/n_mut) uniforms per call instead of n. The position walk
    realizes exactly the i.i.d. Bernoulli(1/n_mut) law per bit; a
    statistical test guards the equivalence.
    """

    __slots__ = ("n", "n_mut", "_inv_log_keep", "_full_mask")

    def __init__(self, n: int, n_mut: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        if n_mut < 1:
            raise ValueError("n_mut must be >= 1")
        self.n = n
        self.n_mut = n_mut
        self._full_mask = (1 << n) - 1
        # 1/ln(1 - p) is negative; multiplied by ln(U) <= 0 it yields
        # the geometric gap. Undefined for p = 1, handled separately.
        self._inv_log_keep = (
            None if n_mut == 1 else 1.0 / math.log1p(-1.0 / n_mut)
        )

    def __call__(self, word: int, rng: Random) -> int:
        inv = self._inv_log_keep
        if inv is None:
            return word ^ self._full_mask
        rnd = rng.random
        n = self.n
        # 1 - U lies in (0, 1], so the log never hits -inf.
        pos = int(math.log(1.0 - rnd()) * inv)
        while pos < n:
            word ^= 1 << pos
            pos += 1 + int(math.log(1.0 - rnd()) * inv)
        return word


def standard_bit_mutation(word: int, n: int, n_mut: int, rng: Random) -> int:
    """One-off form of Mutator for callers outside hot loops."""
    return Mutator(n, n_mut)(word, rng)


@dataclass
class EaState:
    """Incumbent word, its fitness, and the rounds elapsed."""

    word: int
    fval: int
    t: int = 0


def ea_step(state: EaState, fitness: FitnessFunction, mutator: Mutator, rng: Random) -> EaState:
    """One round: mutate, evaluate, accept iff not worse. Mutates state in place."""
    y = mutator(state.word, rng)
    fy = fitness.evaluate(y)
    state.t += 1
    if fy >= state.fval:
        state.word = y
        state.fval = fy
    return state


@dataclass
class EaRunResult:
    word: int
    fval: int
    rounds: int
    hit: bool


def ea_run(
    fitness: FitnessFunction,
    n_mut: int,
    rng: Random | int,
    cap: int | None = None,
    stop_words: frozenset[int] | set[int] | None = None,
) -> EaRunResult:
    """Run from a uniform random start until the stop condition or the cap.

    By default the run stops when the incumbent reaches the optimum
    value. ``stop_words`` instead stops at the first round whose
    incumbent lies in the given set. ``hit`` is False only when the cap
    ran out first. With a fixed seed the trajectory is reproducible
    bit for bit.
    """
    if isinstance(rng, int):
        rng = Random(rng)
    n = fitness.n
    mutator = Mutator(n, n_mut)
    word = rng.getrandbits(n)
    evaluate = fitness.evaluate
    fval = evaluate(word)
    limit = math.inf if cap is None else cap
    t = 0

    if stop_words is None:
        target = fitness.optimum().value
        hit = fval == target
        while not hit and t < limit:
            t += 1
            y = mutator(word, rng)
            fy = evaluate(y)
            if fy >= fval:
                word = y
                fval = fy
                hit = fval == target
    else:
        hit = word in stop_words
        while not hit and t < limit:
            t += 1
            y = mutator(word, rng)
            fy = evaluate(y)
            if fy >= fval:
                word = y
                fval = fy
                hit = word in stop_words
    return EaRunResult(word=word, fval=fval, rounds=t, hit=hit)
