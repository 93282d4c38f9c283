"""Deterministic derivation of independent random streams.

Every stochastic component in this package draws from its own stdlib
``random.Random`` instance whose seed is derived from the master seed
with splitmix64. Derivation is pure 64-bit arithmetic over the parts
(master seed, scenario-name digest, n, replicate index, role tag), so
results never depend on process layout, worker count, or interpreter
hash randomization, and distinct part tuples give independent streams.
"""

from __future__ import annotations

import hashlib
import random

_MASK64 = (1 << 64) - 1

# Role tags used when deriving per-run streams. Arbitrary distinct
# constants; changing them changes every derived stream.
TAG_ISLAND = 0x49534C44
TAG_COIN = 0x434F494E


def splitmix64(z: int) -> int:
    """One splitmix64 step: map a 64-bit value to a well-mixed 64-bit value."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold integers into one 64-bit seed.

    Each part is absorbed with a splitmix64 step, so changing any part
    (or the order of parts) changes the result. Negative parts are
    reduced modulo 2**64 first.
    """
    acc = 0x243F6A8885A308D3
    for p in parts:
        acc = splitmix64(acc ^ (p & _MASK64))
    return acc


def name_digest(name: str) -> int:
    """Stable 64-bit digest of a string (first 8 bytes of its SHA-256)."""
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")


def stream(*parts: int) -> random.Random:
    """A fresh random.Random seeded from mix64(*parts)."""
    return random.Random(mix64(*parts))
