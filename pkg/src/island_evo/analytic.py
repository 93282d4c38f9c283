"""Exact analysis: dense Markov chains for the (1+1) EA and closed forms.

The (1+1) EA with standard bit mutation and not-worse acceptance is a
Markov chain on the 2^n bit strings. For n <= 12 the full transition
matrix fits in memory (state index == packed word), giving exact
expected hitting times and absorption probabilities by dense linear
solves. Closed forms cover the LeadingOnes runtime, the prefix-gated
block composition, min-of-geometrics bounds, and the normalized
binomial sum that controls jump waiting times from a uniform start.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from random import Random

import numpy as np
from scipy.linalg import solve as _dense_solve

from .ea import ea_run
from .fitness import FitnessFunction, Fork

MAX_CHAIN_N = 12


class ChainSizeError(ValueError):
    pass


@dataclass
class ExactChain:
    """Dense one-round transition law of the (1+1) EA on a fitness function."""

    fitness: FitnessFunction
    n_mut: int
    P: np.ndarray  # (2^n, 2^n) row-stochastic, state index == packed word
    fvals: np.ndarray  # (2^n,) int fitness per state

    @property
    def n(self) -> int:
        return self.fitness.n

    @property
    def size(self) -> int:
        return self.P.shape[0]


def build_chain(fitness: FitnessFunction, n_mut: int) -> ExactChain:
    """Exact transition matrix: mutate with per-bit prob 1/n_mut, accept iff
    not worse, rejected mass folded into the diagonal.

    Hard-capped at n <= 12 (the matrix is 8 * 4^n bytes); an estimate is
    printed to stderr before large allocations.
    """
    n = fitness.n
    if n > MAX_CHAIN_N:
        raise ChainSizeError(
            f"dense chain needs 2^{2 * n} float64 entries; capped at n <= {MAX_CHAIN_N}"
        )
    if n_mut < 1:
        raise ValueError("n_mut must be >= 1")
    size = 1 << n
    mat_mb = size * size * 8 / 1e6
    if size >= 2048:
        print(
            f"building dense {size}-state chain: transition matrix ~{mat_mb:.0f} MB,"
            f" peak with solve workspace ~{2 * mat_mb:.0f} MB",
            file=sys.stderr,
        )
    fvals = np.fromiter(
        (fitness.evaluate(w) for w in range(size)), dtype=np.int64, count=size
    )
    p = 1.0 / n_mut
    by_dist = np.array([p**d * (1.0 - p) ** (n - d) for d in range(n + 1)])
    popcnt = np.zeros(size, dtype=np.uint8)
    for w in range(1, size):
        popcnt[w] = popcnt[w >> 1] + (w & 1)
    states = np.arange(size, dtype=np.uint16)
    P = by_dist[popcnt[np.bitwise_xor.outer(states, states)]]
    accept = fvals[None, :] >= fvals[:, None]
    np.fill_diagonal(accept, False)
    P *= accept
    np.fill_diagonal(P, 1.0 - P.sum(axis=1))
    return ExactChain(fitness=fitness, n_mut=n_mut, P=P, fvals=fvals)


def _start_vector(chain: ExactChain, start) -> np.ndarray:
    size = chain.size
    if start is None:
        return np.full(size, 1.0 / size)
    if isinstance(start, int):
        if not 0 <= start < size:
            raise ValueError("start state out of range")
        vec = np.zeros(size)
        vec[start] = 1.0
        return vec
    vec = np.asarray(start, dtype=float)
    if vec.shape != (size,) or vec.min() < 0 or abs(vec.sum() - 1.0) > 1e-9:
        raise ValueError("start must be a probability vector over all states")
    return vec


def _can_reach(P: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Boolean mask of states with a positive-probability path into targets."""
    adj = P > 0.0
    reached = np.zeros(P.shape[0], dtype=bool)
    reached[targets] = True
    while True:
        grown = reached | adj[:, reached].any(axis=1)
        if (grown == reached).all():
            return reached
        reached = grown


def _forward_closure(
    P: np.ndarray, start_mask: np.ndarray, stop_mask: np.ndarray
) -> np.ndarray:
    """States visitable from the start support; stop states absorb."""
    adj = P > 0.0
    seen = start_mask.copy()
    frontier = start_mask & ~stop_mask
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = nxt & ~stop_mask
    return seen


def expected_hitting_time(chain: ExactChain, targets=None, start=None) -> float:
    """Expected rounds until the incumbent first lies in targets.

    targets defaults to the optimum; start defaults to the uniform
    distribution. Start states inside targets contribute 0. Raises if
    some start-support state cannot reach the targets.
    """
    if targets is None:
        target_idx = np.array([chain.fitness.optimum().optimum])
    else:
        if isinstance(targets, int):
            targets = [targets]
        target_idx = np.unique(np.asarray(list(targets), dtype=np.int64))
        if len(target_idx) == 0:
            raise ValueError("need at least one target state")
        if target_idx.min() < 0 or target_idx.max() >= chain.size:
            raise ValueError("target state out of range")
    s = _start_vector(chain, start)
    reached = _can_reach(chain.P, target_idx)
    if not reached[s > 0].all():
        raise ValueError("targets unreachable from part of the start distribution")
    is_target = np.zeros(chain.size, dtype=bool)
    is_target[target_idx] = True
    forward = _forward_closure(chain.P, s > 0, is_target)
    if not reached[forward].all():
        # Positive probability of drifting somewhere the targets are
        # unreachable from, so the expectation is infinite.
        raise ValueError("targets are not almost-surely reached from the start")
    plain = np.flatnonzero(forward & ~is_target)
    h = np.zeros(chain.size)
    if len(plain):
        A = -chain.P[np.ix_(plain, plain)]
        A[np.diag_indices_from(A)] += 1.0
        h[plain] = _dense_solve(A, np.ones(len(plain)), overwrite_a=True)
    return float(s @ h)


def hitting_probability(chain: ExactChain, a: int, b: int, start=None) -> float:
    """Probability that the incumbent visits state a before state b.

    Both states are made absorbing; a start at a (resp. b) contributes
    1 (resp. 0). Raises if some start-support state reaches neither.
    """
    if a == b:
        raise ValueError("a and b must differ")
    for w in (a, b):
        if not 0 <= w < chain.size:
            raise ValueError("state out of range")
    s = _start_vector(chain, start)
    absorbing = np.array([a, b])
    reached = _can_reach(chain.P, absorbing)
    if not reached[s > 0].all():
        raise ValueError("neither state reachable from part of the start distribution")
    is_abs = np.zeros(chain.size, dtype=bool)
    is_abs[absorbing] = True
    plain = np.flatnonzero(reached & ~is_abs)
    u = np.zeros(chain.size)
    u[a] = 1.0
    if len(plain):
        A = -chain.P[np.ix_(plain, plain)]
        A[np.diag_indices_from(A)] += 1.0
        u[plain] = _dense_solve(A, chain.P[plain, a], overwrite_a=True)
    return float(s @ u)


def exact_lo_runtime(n: int) -> float:
    """Exact expected (1+1) EA runtime on LeadingOnes(n) with rate 1/n,
    uniform start: ((n/(n-1))^(n-1) + 1/n - 1) / 2 * n^2."""
    if n < 2:
        raise ValueError("n must be >= 2")
    ratio = n / (n - 1)
    return (ratio ** (n - 1) + 1.0 / n - 1.0) / 2.0 * n * n


def lo_block_runtime(n: int, k: int, inner_expected: float) -> float:
    """Expected runtime of the prefix-gated block composition.

    With n/k blocks of k bits, per-bit rate 1/n, and inner_expected the
    expected rounds to optimize one free-standing block at that rate
    from a uniform start, the total is
    inner_expected * ((n/(n-1))^n - 1) / ((n/(n-1))^k - 1).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if k < 1 or n % k:
        raise ValueError("k must be a positive divisor of n")
    ratio = n / (n - 1)
    return inner_expected * (ratio**n - 1.0) / (ratio**k - 1.0)


def geometric_min_bounds(e_single: float, m: int) -> tuple[float, float, float]:
    """(lower, exact, upper) for the expected minimum of m i.i.d.
    geometric times with mean e_single:
    e/(2m) <= 1/(1 - (1 - 1/e)^m) <= e/m + 1."""
    if e_single < 1.0:
        raise ValueError("e_single must be >= 1")
    if m < 1:
        raise ValueError("m must be >= 1")
    exact = 1.0 / (1.0 - (1.0 - 1.0 / e_single) ** m)
    return e_single / (2.0 * m), exact, e_single / m + 1.0


def choose_sum_div(n: int) -> float:
    """(1/2^n) * sum_{k=1..n} C(n,k) * (n/k), computed exactly then rounded.

    This is the expected wait factor for a single-bit-class jump from a
    uniform start; it tends to 2 and stays within constant bounds.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    total = sum(Fraction(math.comb(n, k) * n, k) for k in range(1, n + 1))
    return float(total / (1 << n))


@dataclass(frozen=True)
class BlackBoxResult:
    evaluations: int
    ea_rounds: int
    enumerated: int


def black_box_fork(n: int, r: int, rng: Random | int, n_mut: int | None = None) -> BlackBoxResult:
    """Optimum-finding strategy that exploits the fork structure.

    Runs a (1+1) EA on Fork(n, r) until the incumbent is 1^n, the
    valley, or the optimum; if the optimum was not reached, evaluates
    the C(n, r) strings at Hamming distance r from 1^n in lexicographic
    flip-set order until the optimum appears. Returns total evaluations
    (EA rounds plus enumeration; the initial evaluation is not counted,
    so a run that starts at the optimum reports 0).
    """
    fit = Fork(n, r)
    wit = fit.optimum()
    ones_w = (1 << n) - 1
    res = ea_run(fit, n_mut or n, rng, stop_words={ones_w, wit.valley, wit.optimum})
    enumerated = 0
    if res.word != wit.optimum:
        for flips in combinations(range(n), r):
            cand = ones_w
            for i in flips:
                cand ^= 1 << i
            enumerated += 1
            if fit.evaluate(cand) == wit.value:
                break
    return BlackBoxResult(
        evaluations=res.rounds + enumerated,
        ea_rounds=res.rounds,
        enumerated=enumerated,
    )
