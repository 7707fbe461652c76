"""Counter-based SplitMix64 generator.

Draw ``k`` for a given seed is ``mix(seed + (k + 1) * GOLDEN)`` where ``mix`` is
the SplitMix64 finaliser.  Any draw can be computed independently, so results
do not depend on evaluation order or vectorisation.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
MASK64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * MIX1
    z = z ^ (z >> np.uint64(27))
    z = z * MIX2
    return z ^ (z >> np.uint64(31))


def splitmix64(seed: int, counters) -> np.ndarray:
    """Raw 64-bit outputs for the given draw counters."""
    counters = np.asarray(counters, dtype=np.uint64)
    base = np.uint64(int(seed) & MASK64)
    with np.errstate(over="ignore"):
        return _mix(base + (counters + np.uint64(1)) * GOLDEN)


def uniforms(seed: int, counters) -> np.ndarray:
    """Doubles in [0, 1) with 53 random bits."""
    bits = splitmix64(seed, counters) >> np.uint64(11)
    return bits.astype(np.float64) * (1.0 / 9007199254740992.0)
