"""Fitness functions checked against naive bit-list reference code.

The references below work on little-endian bit lists and never share
code with the package, so any packing or indexing slip shows up as a
disagreement on the exhaustive small-n sweeps.
"""

from random import Random

import pytest

from island_evo.fitness import (
    BitString,
    BlockSum,
    Fork,
    LeadingBlocks,
    LeadingOnes,
    Masked,
    OneMax,
    build_fitness,
    masked_fork,
    spec_params,
)


def bits_of(word: int, n: int) -> list[int]:
    return [(word >> i) & 1 for i in range(n)]


def ref_onemax(bits):
    return sum(bits)


def ref_leadingones(bits):
    count = 0
    for b in bits:
        if not b:
            break
        count += 1
    return count


def ref_fork(bits, r):
    n = len(bits)
    if bits == [0] * r + [1] * (n - r):
        return n + 1
    if bits == [1] * (n - r) + [0] * r:
        return n + 2
    return sum(bits)


def test_onemax_matches_reference():
    for n in (1, 2, 5, 8):
        fn = OneMax(n)
        for w in range(1 << n):
            assert fn.evaluate(w) == ref_onemax(bits_of(w, n))


def test_leadingones_matches_reference():
    for n in (1, 2, 5, 8):
        fn = LeadingOnes(n)
        for w in range(1 << n):
            assert fn.evaluate(w) == ref_leadingones(bits_of(w, n))


def test_leadingones_at_most_onemax():
    lo, om = LeadingOnes(7), OneMax(7)
    for w in range(1 << 7):
        assert lo.evaluate(w) <= om.evaluate(w)


def test_fork_matches_reference():
    for n, r in ((4, 2), (6, 2), (7, 2), (6, 3), (9, 3)):
        fn = Fork(n, r)
        for w in range(1 << n):
            assert fn.evaluate(w) == ref_fork(bits_of(w, n), r)


def test_fork_witness_and_unique_max():
    fn = Fork(6, 2)
    wit = fn.optimum()
    assert wit.value == 8
    assert wit.valley_value == 7
    assert fn.evaluate(wit.optimum) == 8
    assert fn.evaluate(wit.valley) == 7
    assert BitString(wit.valley, 6).to_string() == "001111"
    assert BitString(wit.optimum, 6).to_string() == "111100"
    maxima = [w for w in range(1 << 6) if fn.evaluate(w) == wit.value]
    assert maxima == [wit.optimum]
    assert fn.has_valley
    for w in range(1 << 6):
        assert fn.is_valley(w) == (w == wit.valley)


def test_fork_parameter_validation():
    with pytest.raises(ValueError):
        Fork(8, 1)
    with pytest.raises(ValueError):
        Fork(3, 2)


def test_fork_reversal_swaps_specials():
    # Reading the string backwards maps the valley pattern onto the
    # optimum pattern and preserves popcount everywhere else.
    fn = Fork(7, 2)
    wit = fn.optimum()
    assert BitString(wit.valley, 7).reverse().word == wit.optimum
    for w in range(1 << 7):
        rev = BitString(w, 7).reverse().word
        assert rev.bit_count() == w.bit_count()


def test_masked_fork_frozen_values():
    fn = masked_fork(6, 2)
    assert fn(BitString.from_string("111111")) == 8
    assert fn(BitString.from_string("001100")) == 7
    assert fn.optimum().optimum == (1 << 6) - 1


def test_masked_matches_reference():
    n, r = 6, 2
    fn = masked_fork(n, r)
    mask_bits = [0] * (n - r) + [1] * r
    for w in range(1 << n):
        xored = [b ^ m for b, m in zip(bits_of(w, n), mask_bits)]
        assert fn.evaluate(w) == ref_fork(xored, r)


def test_masking_is_involution():
    inner = Fork(6, 2)
    mask = 0b101101
    double = Masked(Masked(inner, mask), mask)
    for w in range(1 << 6):
        assert double.evaluate(w) == inner.evaluate(w)


def test_masked_witness_shift():
    inner = Fork(6, 2)
    mask = 0b110101
    fn = Masked(inner, mask)
    wit = fn.optimum()
    assert wit.optimum == inner.optimum().optimum ^ mask
    assert wit.valley == inner.optimum().valley ^ mask
    assert fn.evaluate(wit.optimum) == 8
    assert fn.is_valley(wit.valley)
    assert fn.label() == "fork_masked"


def ref_leading_blocks(bits, k, inner_ref):
    total = 0
    for i in range(len(bits) // k):
        if any(b == 0 for b in bits[: i * k]):
            break
        total += inner_ref(bits[i * k : (i + 1) * k])
    return total


def ref_block_sum(bits, k, inner_ref):
    return sum(
        inner_ref(bits[i * k : (i + 1) * k]) for i in range(len(bits) // k)
    )


def test_leading_blocks_frozen_values():
    fn = LeadingBlocks(OneMax(2), 2)
    assert fn(BitString.from_string("1101")) == 3
    assert fn(BitString.from_string("0111")) == 1
    assert fn(BitString.from_string("1111")) == 4


def test_leading_blocks_matches_reference():
    n, k = 6, 2
    fn = LeadingBlocks(OneMax(k), n // k)
    for w in range(1 << n):
        assert fn.evaluate(w) == ref_leading_blocks(bits_of(w, n), k, ref_onemax)

    n, k, r = 8, 4, 2
    fn = LeadingBlocks(masked_fork(k, r), n // k)
    mask_bits = [0] * (k - r) + [1] * r

    def inner_ref(block):
        return ref_fork([b ^ m for b, m in zip(block, mask_bits)], r)

    for w in range(1 << n):
        assert fn.evaluate(w) == ref_leading_blocks(bits_of(w, n), k, inner_ref)


def test_block_sum_matches_reference():
    n, k, r = 8, 4, 2
    fn = BlockSum(masked_fork(k, r), n // k)
    mask_bits = [0] * (k - r) + [1] * r

    def inner_ref(block):
        return ref_fork([b ^ m for b, m in zip(block, mask_bits)], r)

    for w in range(1 << n):
        assert fn.evaluate(w) == ref_block_sum(bits_of(w, n), k, inner_ref)


def test_block_optimum_is_all_ones():
    for fn in (
        LeadingBlocks(masked_fork(4, 2), 2),
        BlockSum(masked_fork(4, 2), 2),
        LeadingBlocks(OneMax(3), 3),
    ):
        wit = fn.optimum()
        assert wit.optimum == (1 << fn.n) - 1
        values = [fn.evaluate(w) for w in range(1 << fn.n)]
        assert values.count(max(values)) == 1
        assert max(values) == wit.value


def test_block_rejects_unmasked_inner():
    # A plain fork's optimum is not 1^k, so it cannot gate a prefix.
    with pytest.raises(ValueError):
        LeadingBlocks(Fork(4, 2), 2)


def test_build_fitness_spec_shapes():
    fn = build_fitness(
        {"variant": "lo_block", "k": 6, "inner": {"variant": "fork", "r": 2, "masked": True}, "n": 12}
    )
    assert fn.n == 12
    assert fn.label() == "lo_block(fork)"
    assert spec_params(fn) == (2, 6)

    fn = build_fitness({"variant": "fork", "r": 2}, n=8)
    assert isinstance(fn, Fork)
    assert spec_params(fn) == (2, None)

    fn = build_fitness({"variant": "fork", "r": 2, "masked": True}, n=8)
    assert isinstance(fn, Masked)
    assert spec_params(fn) == (2, None)

    # The argument n wins over a spec-embedded one.
    fn = build_fitness({"variant": "onemax", "n": 4}, n=10)
    assert fn.n == 10
    assert spec_params(fn) == (None, None)

    fn = build_fitness({"variant": "om_block", "k": 2, "inner": {"variant": "onemax"}}, n=6)
    assert fn.label() == "om_block(onemax)"
    assert spec_params(fn) == (None, 2)


def test_build_fitness_errors():
    with pytest.raises(ValueError):
        build_fitness({"variant": "nope"}, n=4)
    with pytest.raises(ValueError):
        build_fitness({"variant": "onemax"})  # no n anywhere
    with pytest.raises(ValueError):
        build_fitness({"variant": "onemax", "bogus": 1}, n=4)
    with pytest.raises(ValueError):
        build_fitness({"variant": "fork"}, n=8)  # missing r
    with pytest.raises(ValueError):
        build_fitness({"variant": "lo_block", "k": 5, "inner": {"variant": "onemax"}}, n=12)
    with pytest.raises(ValueError):
        build_fitness(
            {"variant": "lo_block", "k": 4, "inner": {"variant": "fork", "r": 2, "masked": False}},
            n=8,
        )


def test_bitstring_basics():
    rng = Random(3)
    for n in (1, 5, 12):
        for _ in range(20):
            b = BitString.random(n, rng)
            assert BitString.from_string(b.to_string()) == b
            assert b.popcount() == sum(b.bit(i) for i in range(n))
            assert b.reverse().reverse() == b
    assert BitString.zeros(4).to_string() == "0000"
    assert BitString.ones(4).to_string() == "1111"
    assert BitString.from_string("0011").word == 0b1100
    flipped = BitString.from_string("0011").flip(0b0001)
    assert flipped.to_string() == "1011"
    with pytest.raises(AttributeError):
        BitString.zeros(4).word = 1
    with pytest.raises(ValueError):
        BitString(16, 4)
    with pytest.raises(ValueError):
        BitString.from_string("01x")


def test_call_checks_length():
    with pytest.raises(ValueError):
        OneMax(4)(BitString.zeros(5))
