"""SplitMix64-derived per-trial random streams.

The derivation is part of the output contract and must stay bit-exact:

* ``splitmix64(x)`` is the first output of a SplitMix64 generator whose state
  is ``x``: add the golden gamma, then apply the two xor-shift-multiply rounds
  and a final xor-shift;
* the stream of trial ``i`` starts from
  ``state = splitmix64(master_seed ^ splitmix64(i))``;
* draw ``k`` (1-based) is ``mix(state + k * GAMMA)``, a standard SplitMix64
  generator seeded with ``state``;
* a uniform in [0, 1) is the top 53 bits of a draw times 2**-53.

All arithmetic is modulo 2**64.
"""

from __future__ import annotations

import numpy as np

MASK64 = 2**64 - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
UNIFORM_SCALE = 2.0**-53

_U_GAMMA = np.uint64(GAMMA)
_U_MIX1 = np.uint64(MIX1)
_U_MIX2 = np.uint64(MIX2)
_SHIFT30 = np.uint64(30)
_SHIFT27 = np.uint64(27)
_SHIFT31 = np.uint64(31)
_SHIFT11 = np.uint64(11)


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def splitmix64(x: int) -> int:
    return _mix((x + GAMMA) & MASK64)


def to_uniform(value: int) -> float:
    return (value >> 11) * UNIFORM_SCALE


class TrialStream:
    """Deterministic stream of 64-bit draws for one trial."""

    def __init__(self, master_seed: int, trial_index: int):
        self.master_seed = master_seed & MASK64
        self.trial_index = trial_index
        self._state = splitmix64(self.master_seed ^ splitmix64(trial_index & MASK64))
        self.draws = 0

    def next_u64(self) -> int:
        self._state = (self._state + GAMMA) & MASK64
        self.draws += 1
        return _mix(self._state)

    def next_uniform(self) -> float:
        return to_uniform(self.next_u64())

    def __iter__(self):
        return self

    def __next__(self) -> float:
        return self.next_uniform()


def derive_trial_stream(master_seed: int, trial_index: int) -> TrialStream:
    """Return the stream of *trial_index*; a pure function of its arguments."""

    return TrialStream(master_seed, trial_index)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> _SHIFT30)) * _U_MIX1
    z = (z ^ (z >> _SHIFT27)) * _U_MIX2
    return z ^ (z >> _SHIFT31)


def uniform_block(master_seed: int, start: int, stop: int, draws: int) -> np.ndarray:
    """Uniforms for trials ``start..stop-1``: an array of shape (stop - start, draws).

    Row ``r``, column ``k`` equals the ``k + 1``-th uniform of
    ``derive_trial_stream(master_seed, start + r)`` bit for bit.
    """

    indices = np.arange(start, stop, dtype=np.uint64)
    seed = np.uint64(master_seed & MASK64)
    with np.errstate(over="ignore"):
        state = _mix_array((seed ^ _mix_array(indices + _U_GAMMA)) + _U_GAMMA)
        columns = []
        for _ in range(draws):
            state = state + _U_GAMMA
            columns.append((_mix_array(state) >> _SHIFT11).astype(np.float64) * UNIFORM_SCALE)
    return np.stack(columns, axis=1) if columns else np.empty((stop - start, 0))


__all__ = [
    "splitmix64",
    "to_uniform",
    "TrialStream",
    "derive_trial_stream",
    "uniform_block",
]
