"""Exact jump-chain simulation of the augmented multiplicative coalescent.

Blocks ``i != j`` merge at rate ``x_i x_j`` and block ``i`` gains a surplus
at rate ``x_i**2 / 2``. Summed over all events the total rate is
``sigma1**2 / 2``, and drawing an ordered pair of indices independently
with probabilities proportional to mass selects each event with the right
probability: ``i == j`` is a surplus jump, otherwise a merge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import AugmentedPartition, InvalidInputError, ScalingParams, canonicalize_arrays


@dataclass(frozen=True, eq=False)
class ChainState:
    """Blocks in canonical order plus the current time.

    With ``unit`` set, every mass is an integer multiple of ``unit`` and the
    chain merges the integer multiples, so masses stay bit-identical to
    ``count * unit`` and the total mass is conserved exactly.
    """

    blocks: AugmentedPartition
    clock: float = 0.0
    unit: float | None = None

    def __post_init__(self):
        if self.unit is not None:
            w = self.blocks.masses / self.unit
            if not np.allclose(w, np.rint(w), rtol=0, atol=1e-9):
                raise InvalidInputError("masses are not multiples of unit")

    @classmethod
    def from_pairs(cls, pairs, clock: float = 0.0) -> "ChainState":
        masses = np.array([x for x, _ in pairs], dtype=np.float64)
        surpluses = np.array([k for _, k in pairs], dtype=np.int64)
        return cls(canonicalize_arrays(masses, surpluses), clock)

    @classmethod
    def initial(cls, params: ScalingParams) -> "ChainState":
        """``n`` blocks of mass ``n**(-2/3)`` and no surplus."""
        unit = params.vertex_mass
        blocks = canonicalize_arrays(np.full(params.n, unit), np.zeros(params.n, dtype=np.int64))
        return cls(blocks, 0.0, unit)

    @property
    def total_mass(self) -> float:
        if self.unit is not None:
            return float(self._weights().sum() * self.unit)
        return math.fsum(self.blocks.masses)

    @property
    def total_surplus(self) -> int:
        return int(self.blocks.surpluses.sum())

    def __len__(self) -> int:
        return len(self.blocks)

    def _weights(self) -> np.ndarray:
        if self.unit is None:
            return self.blocks.masses.copy()
        return np.rint(self.blocks.masses / self.unit).astype(np.int64)

    def _rebuild(self, weights, surpluses, clock: float) -> "ChainState":
        masses = weights if self.unit is None else weights * self.unit
        return ChainState(canonicalize_arrays(masses, surpluses), clock, self.unit)


def _pick_pair(cum: np.ndarray, rng: np.random.Generator) -> tuple[int, int]:
    i, j = np.searchsorted(cum, rng.random(2) * cum[-1], side="right")
    last = cum.size - 1
    return min(int(i), last), min(int(j), last)


def _jump(weights, surpluses, i, j):
    if i == j:
        surpluses[i] += 1
        return weights, surpluses
    lo, hi = min(i, j), max(i, j)
    weights[lo] += weights[hi]
    surpluses[lo] += surpluses[hi]
    return np.delete(weights, hi), np.delete(surpluses, hi)


def step(state: ChainState, rng: np.random.Generator) -> tuple[ChainState, float]:
    """One jump: returns the new canonical state and the holding time."""
    if len(state) == 0:
        raise InvalidInputError("empty state")
    sigma1 = state.total_mass
    hold = rng.exponential(2.0 / sigma1**2)
    weights = state._weights()
    surpluses = state.blocks.surpluses.copy()
    i, j = _pick_pair(np.cumsum(weights), rng)
    weights, surpluses = _jump(weights, surpluses, i, j)
    return state._rebuild(weights, surpluses, state.clock + hold), hold


def run(initial: ChainState, duration: float, rng: np.random.Generator) -> ChainState:
    """State at ``initial.clock + duration``.

    Same dynamics as repeated :func:`step` calls, but blocks are only put in
    canonical order at the end; block order does not affect the law of the
    selected pair.
    """
    if duration < 0:
        raise InvalidInputError("duration must be nonnegative")
    if duration == 0 or len(initial) == 0:
        return ChainState(initial.blocks, initial.clock + duration, initial.unit)
    weights = initial._weights()
    surpluses = initial.blocks.surpluses.copy()
    # total mass never changes, so neither does the total rate
    scale = 2.0 / initial.total_mass**2
    elapsed = 0.0
    cum = np.cumsum(weights)
    while True:
        elapsed += rng.exponential(scale)
        if elapsed > duration:
            break
        i, j = _pick_pair(cum, rng)
        weights, surpluses = _jump(weights, surpluses, i, j)
        if i != j:
            cum = np.cumsum(weights)
    return initial._rebuild(weights, surpluses, initial.clock + duration)


def run_observed(initial: ChainState, times, rng: np.random.Generator) -> list[ChainState]:
    """States at each of the increasing absolute observation ``times``.

    Restarting the clock at each observation is exact by memorylessness.
    """
    out = []
    state = initial
    for t in times:
        if t < state.clock:
            raise InvalidInputError("observation times must be increasing and >= start clock")
        state = run(state, t - state.clock, rng)
        out.append(state)
    return out
