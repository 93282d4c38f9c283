"""Pseudo-boolean fitness functions on packed bit strings.

A bit string of length n is stored as a Python int whose bit i is x_i,
so OneMax-family evaluation is a single popcount and every evaluation
stays O(n / wordsize) amortized. The printable form writes x_0 first:
"0011" means x_0 = x_1 = 0 and x_2 = x_3 = 1.

All fitness values are ints. Every function here has a unique maximum,
reported through ``optimum()`` together with the valley witness where
one exists (the fork family's second-best string).
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random


class BitString:
    """Immutable length-n bit string packed into an int."""

    __slots__ = ("word", "n")

    def __init__(self, word: int, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= word < (1 << n):
            raise ValueError(f"word out of range for n={n}")
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "n", n)

    def __setattr__(self, *_):
        raise AttributeError("BitString is immutable")

    @classmethod
    def from_string(cls, s: str) -> "BitString":
        if not s or set(s) - {"0", "1"}:
            raise ValueError("expected a nonempty string of 0s and 1s")
        word = 0
        for i, ch in enumerate(s):
            if ch == "1":
                word |= 1 << i
        return cls(word, len(s))

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls(0, n)

    @classmethod
    def ones(cls, n: int) -> "BitString":
        return cls((1 << n) - 1, n)

    @classmethod
    def random(cls, n: int, rng: Random) -> "BitString":
        return cls(rng.getrandbits(n), n)

    def to_string(self) -> str:
        return "".join("1" if self.word >> i & 1 else "0" for i in range(self.n))

    def popcount(self) -> int:
        return self.word.bit_count()

    def bit(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(f"bit index {i} out of range")
        return self.word >> i & 1

    def flip(self, mask: int) -> "BitString":
        """New BitString with the masked positions flipped."""
        if not 0 <= mask < (1 << self.n):
            raise ValueError("mask out of range")
        return BitString(self.word ^ mask, self.n)

    def reverse(self) -> "BitString":
        """New BitString with x_i mapped to x_(n-1-i)."""
        w = 0
        word = self.word
        for i in range(self.n):
            if word >> i & 1:
                w |= 1 << (self.n - 1 - i)
        return BitString(w, self.n)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitString)
            and self.word == other.word
            and self.n == other.n
        )

    def __hash__(self) -> int:
        return hash((self.word, self.n))

    def __repr__(self) -> str:
        return f"BitString('{self.to_string()}')"


@dataclass(frozen=True)
class OptimumWitness:
    """Unique maximum of a fitness function, plus the valley where one exists.

    Words are packed ints in the same convention as BitString.
    """

    optimum: int
    value: int
    valley: int | None = None
    valley_value: int | None = None


def _trailing_ones(word: int) -> int:
    # word ^ (word + 1) masks the trailing ones plus the lowest zero bit.
    return (word ^ (word + 1)).bit_length() - 1


class FitnessFunction:
    """Integer-valued function of a packed word of fixed length n."""

    n: int

    def evaluate(self, word: int) -> int:
        raise NotImplementedError

    def optimum(self) -> OptimumWitness:
        raise NotImplementedError

    # Valley semantics exist only for the fork family; the simulator
    # records valley counters just for those.
    has_valley: bool = False

    def is_valley(self, word: int) -> bool:
        return False

    def label(self) -> str:
        raise NotImplementedError

    def __call__(self, bits: BitString) -> int:
        if bits.n != self.n:
            raise ValueError(f"expected n={self.n}, got n={bits.n}")
        return self.evaluate(bits.word)


class OneMax(FitnessFunction):
    """Number of one bits."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n

    def evaluate(self, word: int) -> int:
        return word.bit_count()

    def optimum(self) -> OptimumWitness:
        return OptimumWitness(optimum=(1 << self.n) - 1, value=self.n)

    def label(self) -> str:
        return "onemax"


class LeadingOnes(FitnessFunction):
    """Length of the all-ones prefix."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n

    def evaluate(self, word: int) -> int:
        return _trailing_ones(word)

    def optimum(self) -> OptimumWitness:
        return OptimumWitness(optimum=(1 << self.n) - 1, value=self.n)

    def label(self) -> str:
        return "leadingones"


class Fork(FitnessFunction):
    """OneMax with two special strings above the all-ones level.

    The valley 0^r 1^(n-r) scores n+1 and the optimum 1^(n-r) 0^r
    scores n+2; every other string scores its popcount. A hill climber
    therefore tends to reach 1^n and must then jump r specific bits to
    either special string, and leaving the valley needs the exact 2r-bit
    jump to the optimum.
    """

    def __init__(self, n: int, r: int):
        if r < 2:
            raise ValueError("r must be >= 2")
        if n < 2 * r:
            raise ValueError("n must be >= 2r")
        self.n = n
        self.r = r
        self._valley = ((1 << (n - r)) - 1) << r
        self._opt = (1 << (n - r)) - 1

    def evaluate(self, word: int) -> int:
        if word == self._valley:
            return self.n + 1
        if word == self._opt:
            return self.n + 2
        return word.bit_count()

    def optimum(self) -> OptimumWitness:
        return OptimumWitness(
            optimum=self._opt,
            value=self.n + 2,
            valley=self._valley,
            valley_value=self.n + 1,
        )

    has_valley = True

    def is_valley(self, word: int) -> bool:
        return word == self._valley

    def label(self) -> str:
        return "fork"


class Masked(FitnessFunction):
    """Inner fitness evaluated on word XOR mask.

    XOR relabels the hypercube, so the inner function's structure is
    preserved with all witnesses shifted by the mask.
    """

    def __init__(self, inner: FitnessFunction, mask: int):
        if not 0 <= mask < (1 << inner.n):
            raise ValueError("mask out of range")
        self.inner = inner
        self.mask = mask
        self.n = inner.n
        self.has_valley = inner.has_valley

    def evaluate(self, word: int) -> int:
        return self.inner.evaluate(word ^ self.mask)

    def optimum(self) -> OptimumWitness:
        w = self.inner.optimum()
        return OptimumWitness(
            optimum=w.optimum ^ self.mask,
            value=w.value,
            valley=None if w.valley is None else w.valley ^ self.mask,
            valley_value=w.valley_value,
        )

    def is_valley(self, word: int) -> bool:
        return self.inner.is_valley(word ^ self.mask)

    def label(self) -> str:
        return self.inner.label() + "_masked"


def masked_fork(n: int, r: int) -> Masked:
    """Fork relabeled so its optimum is 1^n (mask 0^(n-r) 1^r)."""
    return Masked(Fork(n, r), ((1 << r) - 1) << (n - r))


def _check_block_inner(inner: FitnessFunction, k: int) -> None:
    if inner.n != k:
        raise ValueError(f"inner function must have n={k}")
    if inner.optimum().optimum != (1 << k) - 1:
        raise ValueError("block inner function must have its optimum at 1^k")


class LeadingBlocks(FitnessFunction):
    """Sum of per-block scores gated by an all-ones raw-bit prefix.

    The word splits into n/k blocks of k bits. Block i contributes
    inner(block_i) iff bits 0..ik-1 are all ones (the empty prefix for
    block 0 always counts). Requires the inner optimum at 1^k, which
    makes 1^n the unique maximum with value (n/k) * inner max.
    """

    def __init__(self, inner: FitnessFunction, m_blocks: int):
        if m_blocks < 1:
            raise ValueError("need at least one block")
        k = inner.n
        _check_block_inner(inner, k)
        self.inner = inner
        self.k = k
        self.m_blocks = m_blocks
        self.n = k * m_blocks
        self._kmask = (1 << k) - 1
        self.has_valley = inner.has_valley

    def evaluate(self, word: int) -> int:
        t = _trailing_ones(word)
        imax = t // self.k
        if imax >= self.m_blocks:
            imax = self.m_blocks - 1
        k = self.k
        kmask = self._kmask
        inner_eval = self.inner.evaluate
        total = 0
        for i in range(imax + 1):
            total += inner_eval((word >> (i * k)) & kmask)
        return total

    def optimum(self) -> OptimumWitness:
        return OptimumWitness(
            optimum=(1 << self.n) - 1,
            value=self.m_blocks * self.inner.optimum().value,
        )

    def is_valley(self, word: int) -> bool:
        # Diagnostic: the first incomplete block sits at the inner valley.
        t = _trailing_ones(word)
        if t >= self.n:
            return False
        block = (word >> (t // self.k) * self.k) & self._kmask
        return self.inner.is_valley(block)

    def label(self) -> str:
        return f"lo_block({self.inner.label().removesuffix('_masked')})"


class BlockSum(FitnessFunction):
    """Plain sum of per-block scores over n/k blocks of k bits."""

    def __init__(self, inner: FitnessFunction, m_blocks: int):
        if m_blocks < 1:
            raise ValueError("need at least one block")
        k = inner.n
        _check_block_inner(inner, k)
        self.inner = inner
        self.k = k
        self.m_blocks = m_blocks
        self.n = k * m_blocks
        self._kmask = (1 << k) - 1
        self.has_valley = inner.has_valley

    def evaluate(self, word: int) -> int:
        k = self.k
        kmask = self._kmask
        inner_eval = self.inner.evaluate
        total = 0
        for i in range(self.m_blocks):
            total += inner_eval((word >> (i * k)) & kmask)
        return total

    def optimum(self) -> OptimumWitness:
        return OptimumWitness(
            optimum=(1 << self.n) - 1,
            value=self.m_blocks * self.inner.optimum().value,
        )

    def is_valley(self, word: int) -> bool:
        # Diagnostic: any block sits at the inner valley.
        k = self.k
        kmask = self._kmask
        inner_valley = self.inner.is_valley
        return any(
            inner_valley((word >> (i * k)) & kmask) for i in range(self.m_blocks)
        )

    def label(self) -> str:
        return f"om_block({self.inner.label().removesuffix('_masked')})"


_SIMPLE_VARIANTS = ("onemax", "leadingones", "fork")
_BLOCK_VARIANTS = ("lo_block", "om_block")


def build_fitness(spec: dict, n: int | None = None) -> FitnessFunction:
    """Build a fitness function from its JSON-style description.

    Examples::

        {"variant": "onemax", "n": 10}
        {"variant": "fork", "r": 2, "n": 8}
        {"variant": "fork", "r": 2, "masked": true, "n": 8}
        {"variant": "lo_block", "k": 6, "inner": {"variant": "fork", "r": 2}, "n": 12}

    ``n`` may come from the dict or the argument; the argument wins so
    scenario templates can omit it. Block inners are built with n=k and
    fork inners are always masked to put the block optimum at 1^k
    (an explicit ``"masked": false`` inside a block is rejected).
    """
    if not isinstance(spec, dict):
        raise ValueError("fitness spec must be an object")
    spec = dict(spec)
    variant = spec.pop("variant", None)
    if variant not in _SIMPLE_VARIANTS + _BLOCK_VARIANTS:
        raise ValueError(f"unknown fitness variant: {variant!r}")
    if n is None:
        n = spec.pop("n", None)
        if n is None:
            raise ValueError("fitness spec needs n")
    else:
        spec.pop("n", None)
    if not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive int")

    if variant == "onemax":
        fn: FitnessFunction = OneMax(n)
    elif variant == "leadingones":
        fn = LeadingOnes(n)
    elif variant == "fork":
        r = spec.pop("r", None)
        if not isinstance(r, int):
            raise ValueError("fork needs an int r")
        masked = spec.pop("masked", False)
        fn = masked_fork(n, r) if masked else Fork(n, r)
    else:
        k = spec.pop("k", None)
        if not isinstance(k, int) or k < 1:
            raise ValueError(f"{variant} needs a positive int k")
        if n % k != 0:
            raise ValueError(f"k={k} must divide n={n}")
        inner_spec = spec.pop("inner", None)
        if not isinstance(inner_spec, dict):
            raise ValueError(f"{variant} needs an inner fitness spec")
        inner = _build_block_inner(inner_spec, k)
        fn = (LeadingBlocks if variant == "lo_block" else BlockSum)(inner, n // k)
    if spec:
        raise ValueError(f"unknown fitness spec fields: {sorted(spec)}")
    return fn


def _build_block_inner(inner_spec: dict, k: int) -> FitnessFunction:
    inner_spec = dict(inner_spec)
    variant = inner_spec.get("variant")
    if variant == "fork":
        if inner_spec.pop("masked", True) is not True:
            raise ValueError("a fork block is always masked (optimum at 1^k)")
        inner_spec["masked"] = True
    return build_fitness(inner_spec, n=k)


def spec_params(fn: FitnessFunction) -> tuple[int | None, int | None]:
    """(r, k) parameters of a built fitness, for reporting. None if absent."""
    r: int | None = None
    k: int | None = None
    if isinstance(fn, Fork):
        r = fn.r
    elif isinstance(fn, Masked) and isinstance(fn.inner, Fork):
        r = fn.inner.r
    elif isinstance(fn, (LeadingBlocks, BlockSum)):
        k = fn.k
        inner_r, _ = spec_params(fn.inner)
        r = inner_r
    return r, k
