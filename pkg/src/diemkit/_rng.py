"""Counter-based deterministic random streams.

Every draw is a pure function of (stream key, trial, lane), so vectors can be
generated in any order, in parallel, or in batches and always come out
bitwise identical.  The generator is splitmix64 run in counter mode: the
output for counter c is ``finalize(key + c * GOLDEN)`` where ``finalize`` is
the splitmix64 avalanche function (a 64-bit bijection).

Counter layout: c = (trial << LANE_BITS) | lane, so every trial owns a
private block of 2**LANE_BITS lanes and trials can never overlap.
"""

from __future__ import annotations

import numpy as np

_U = np.uint64
GOLDEN = 0x9E3779B97F4A7C15
_M1 = _U(0xBF58476D1CE4E5B9)
_M2 = _U(0x94D049BB133111EB)
_GOLD = _U(GOLDEN)

LANE_BITS = 26
MAX_LANES = 1 << LANE_BITS          # coordinates per trial (per stream)
MAX_TRIALS = 1 << (64 - LANE_BITS)  # trial indices per stream

_INV_2_53 = 1.0 / (1 << 53)


def _finalize(z: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    # splitmix64 output function; wraps mod 2**64 by uint64 arithmetic
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U(30))) * _M1
        z = (z ^ (z >> _U(27))) * _M2
        return z ^ (z >> _U(31))


def stream_key(*parts: int) -> int:
    """Derive a 64-bit stream key from integer components.

    Each component is absorbed through a bijective round, so distinct
    component tuples of the same arity give distinct keys.
    """
    key = _U(0x6A09E667F3BCC909)
    with np.errstate(over="ignore"):
        for part in parts:
            key = _finalize((key ^ _U(int(part) & 0xFFFFFFFFFFFFFFFF)) * _GOLD + _U(1))
    return int(key)


def raw_block(key: int, trial_start: int, trial_count: int, lanes: int) -> np.ndarray:
    """uint64 block of shape (trial_count, lanes) for the given stream."""
    if lanes > MAX_LANES:
        raise ValueError(f"lane count {lanes} exceeds stream capacity {MAX_LANES}")
    if trial_start + trial_count > MAX_TRIALS:
        raise ValueError(f"trial index {trial_start + trial_count} exceeds capacity {MAX_TRIALS}")
    trials = np.arange(trial_start, trial_start + trial_count, dtype=np.uint64)
    lane = np.arange(lanes, dtype=np.uint64)
    with np.errstate(over="ignore"):
        counters = (trials[:, None] << _U(LANE_BITS)) | lane[None, :]
        return _finalize(_U(key) + counters * _GOLD)


def uniform_block(key: int, trial_start: int, trial_count: int, lanes: int) -> np.ndarray:
    """Doubles in [0, 1), shape (trial_count, lanes)."""
    bits = raw_block(key, trial_start, trial_count, lanes)
    return (bits >> _U(11)).astype(np.float64) * _INV_2_53


def uniform_open_block(key: int, trial_start: int, trial_count: int, lanes: int) -> np.ndarray:
    """Doubles in (0, 1], shape (trial_count, lanes); safe as a log argument."""
    bits = raw_block(key, trial_start, trial_count, lanes)
    return ((bits >> _U(11)) + _U(1)).astype(np.float64) * _INV_2_53


def normal_block(key_u1: int, key_u2: int, trial_start: int, trial_count: int,
                 lanes: int) -> np.ndarray:
    """Standard normals via Box-Muller (cosine branch), shape (trial_count, lanes)."""
    u1 = uniform_open_block(key_u1, trial_start, trial_count, lanes)
    u2 = uniform_block(key_u2, trial_start, trial_count, lanes)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
