"""Grid approximation of the limit object: Brownian motion with parabolic
drift, its reflection above the running minimum, the ordered excursion
lengths, their areas and Poisson marks.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .core import AugmentedPartition, InvalidInputError, canonicalize_arrays
from .sbfw import ExcursionRecord, poisson_marks

DEFAULT_STEP = 1e-4


@dataclass(frozen=True, eq=False)
class GridPath:
    step: float
    values: np.ndarray

    @property
    def horizon(self) -> float:
        return (self.values.size - 1) * self.step

    def grid(self) -> np.ndarray:
        return np.arange(self.values.size) * self.step


@dataclass(frozen=True)
class LimitConfig:
    """Discretization controls. ``horizon`` defaults to ``t + 10`` and
    ``min_excursion_length`` to ten grid steps."""

    t: float = 0.0
    horizon: float | None = None
    step: float = DEFAULT_STEP
    min_excursion_length: float | None = None

    def __post_init__(self):
        if self.horizon is None:
            object.__setattr__(self, "horizon", self.t + 10.0)
        if self.min_excursion_length is None:
            object.__setattr__(self, "min_excursion_length", 10.0 * self.step)
        eps = self.min_excursion_length
        if not (self.step > 0 and self.horizon > 0):
            raise InvalidInputError("step and horizon must be positive")
        if eps < 0 or (eps > 0 and not self.step < eps <= self.horizon):
            raise InvalidInputError("need step < min_excursion_length <= horizon")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.step))


def sample_wt(config: LimitConfig, rng: np.random.Generator) -> GridPath:
    """``W(s) - s**2/2 + t*s`` on the grid ``0, step, ..., horizon``."""
    k = config.n_steps
    w = np.empty(k + 1)
    w[0] = 0.0
    np.cumsum(rng.normal(0.0, np.sqrt(config.step), size=k), out=w[1:])
    s = np.arange(k + 1) * config.step
    w += s * (config.t - 0.5 * s)
    return GridPath(config.step, w)


def reflect_grid(path: GridPath) -> GridPath:
    v = path.values
    return GridPath(path.step, v - np.minimum.accumulate(v))


@dataclass(frozen=True, eq=False)
class GridExcursions:
    """Excursions longest first (ties by start), as parallel arrays."""

    start: np.ndarray
    length: np.ndarray
    area: np.ndarray

    def __len__(self) -> int:
        return int(self.start.size)

    def records(self, marks=None) -> list[ExcursionRecord]:
        if marks is None:
            marks = np.zeros(len(self), dtype=np.int64)
        return [
            ExcursionRecord(float(a), float(a + l), float(l), float(s), int(m))
            for a, l, s, m in zip(self.start, self.length, self.area, marks)
        ]


def grid_excursion_table(b: GridPath, eps: float) -> GridExcursions:
    """Maximal runs of strictly positive grid values.

    A run of ``k`` points ``i0 .. i0+k-1`` is taken to occupy
    ``[(i0 - 1/2) step, (i0 + k - 1/2) step]`` with the path forced to zero at
    both ends, so its length is ``k * step`` and its trapezoid area is
    ``step * (sum - (first + last) / 4)``. Runs shorter than ``eps`` are dropped.
    """
    v = b.values
    pos = np.concatenate(([0], (v > 0).view(np.int8), [0]))
    edges = np.diff(pos)
    i0 = np.flatnonzero(edges == 1)
    i1 = np.flatnonzero(edges == -1)
    if i0.size == 0:
        empty = np.empty(0)
        return GridExcursions(empty, empty, empty)
    h = b.step
    csum = np.concatenate(([0.0], np.cumsum(v)))
    total = csum[i1] - csum[i0]
    area = h * (total - 0.25 * (v[i0] + v[i1 - 1]))
    length = (i1 - i0) * h
    start = (i0 - 0.5) * h
    keep = length >= eps
    start, length, area = start[keep], length[keep], area[keep]
    order = np.lexsort((start, -length))
    return GridExcursions(start[order], length[order], area[order])


def grid_excursions(b: GridPath, eps: float) -> list[ExcursionRecord]:
    return grid_excursion_table(b, eps).records()


def sample_limit_excursions(config: LimitConfig, rng: np.random.Generator) -> GridExcursions:
    return grid_excursion_table(reflect_grid(sample_wt(config, rng)), config.min_excursion_length)


def sample_limit_state(config: LimitConfig, rng: np.random.Generator) -> AugmentedPartition:
    """Approximate draw of (excursion lengths, marks) of the limit process."""
    exc = sample_limit_excursions(config, rng)
    return canonicalize_arrays(exc.length, poisson_marks(exc.area, rng))


def write_path_csv(config: LimitConfig, rng: np.random.Generator, fh: TextIO) -> None:
    """Dump one sampled path as CSV rows ``s, W^t, B^t``."""
    w = sample_wt(config, rng)
    b = reflect_grid(w)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["s", "W_t", "B_t"])
    for s, wv, bv in zip(w.grid(), w.values, b.values):
        writer.writerow([repr(float(s)), repr(float(wv)), repr(float(bv))])
