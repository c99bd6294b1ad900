"""Counter-based deterministic uniform stream.

Value j of a stream with 64-bit key K is a pure function of (K, j): the
splitmix64 finalizer applied to K + (j+1)*GOLDEN, mapped to [0, 1) with 53
mantissa bits.  Because there is no evolving hidden state, any slice of a
stream can be produced independently, in any order, scalar or batched, with
bit-identical results.  That property is what makes simulation trials
reproducible regardless of execution order or parallelism.

:func:`mix` derives per-trial keys from a base seed; it is the fixed mixing
function referenced by the simulation contract.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_B = 0xD1B54A32D192ED03
_MIX_C = 0x8CB92BA72F3D8DD7
_SM_M1 = 0xBF58476D1CE4E5B9
_SM_M2 = 0x94D049BB133111EB


def _finalize(z: int) -> int:
    """splitmix64 output function (a bijection on 64-bit words)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _SM_M1) & MASK64
    z = ((z ^ (z >> 27)) * _SM_M2) & MASK64
    return z ^ (z >> 31)


def mix(seed: int, t: int) -> int:
    """Derive the 64-bit stream key for trial t from a base seed.

    mix(seed, t) = finalize(seed*GOLDEN + t*B + C mod 2^64) with the odd
    constants above; distinct trials of one seed never share a key.
    """
    return _finalize(seed * GOLDEN + t * _MIX_B + _MIX_C)


def mix_block(seed: int, t0: int, count: int) -> np.ndarray:
    """Stream keys mix(seed, t) for t0 <= t < t0+count, as a uint64 array."""
    base = np.uint64((seed * GOLDEN + _MIX_C) & MASK64)
    t = np.arange(t0, t0 + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = base + t * np.uint64(_MIX_B)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_SM_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_SM_M2)
        return z ^ (z >> np.uint64(31))


def uniform(key: int, counter: int) -> float:
    """Uniform value in [0, 1) at position ``counter`` of stream ``key``."""
    z = _finalize(key + (counter + 1) * GOLDEN)
    return (z >> 11) * 2.0**-53


def uniform_block(keys: np.ndarray, start: int, count: int) -> np.ndarray:
    """Matrix of uniforms: row t holds positions start..start+count-1 of keys[t].

    Bit-identical to calling :func:`uniform` entry by entry.
    """
    keys = np.asarray(keys, dtype=np.uint64)
    j = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = keys[:, None] + j[None, :] * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_SM_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_SM_M2)
        z ^= z >> np.uint64(31)
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


class CounterStream:
    """Sequential reader over one stream: each call consumes the next value."""

    def __init__(self, key: int):
        self.key = key & MASK64
        self.counter = 0

    def next_uniform(self) -> float:
        u = uniform(self.key, self.counter)
        self.counter += 1
        return u
