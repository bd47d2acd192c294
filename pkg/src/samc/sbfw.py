"""Breadth-first walk at a fixed critical time and its excursions.

The walk is a negative drift plus positive jumps. It is kept as jump times
and constants, never as a sampled path, and every excursion above the past
infimum is found in closed form: between jumps the reflected walk falls
linearly, so the end of an excursion is its start plus (total jump
mass) / |drift|, and its area is a sum of trapezoids.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import AugmentedPartition, InvalidInputError, ScalingParams, canonicalize_arrays


@dataclass(frozen=True, eq=False)
class JumpWalk:
    """``Z(s) = sum(jump_size[k] for jump_times[k] <= s) + drift * s``.

    ``jump_size`` is either a scalar shared by all jumps or one value per
    jump. ``mass_unit``, when given, is the exact value of
    ``jump_size / |drift|`` used for excursion lengths, so that lengths are
    integer multiples of it.
    """

    jump_times: np.ndarray
    jump_size: float | np.ndarray
    drift: float
    mass_unit: float | None = None

    def __post_init__(self):
        times = np.asarray(self.jump_times, dtype=np.float64).ravel()
        if times.size and (times[0] < 0 or np.any(np.diff(times) <= 0)):
            raise InvalidInputError("jump times must be nonnegative and strictly increasing")
        if not self.drift < 0:
            raise InvalidInputError("drift must be negative")
        size = self.jump_size
        if np.ndim(size) == 0:
            size = float(size)
            if not size > 0:
                raise InvalidInputError("jump size must be positive")
        else:
            size = np.asarray(size, dtype=np.float64).ravel()
            if size.shape != times.shape or np.any(size <= 0):
                raise InvalidInputError("need one positive jump size per jump time")
        if self.mass_unit is not None:
            if np.ndim(size) != 0 or not np.isclose(self.mass_unit, size / -self.drift, rtol=1e-12):
                raise InvalidInputError("mass_unit must equal jump_size / |drift|")
        object.__setattr__(self, "jump_times", times)
        object.__setattr__(self, "jump_size", size)
        object.__setattr__(self, "drift", float(self.drift))

    @property
    def n_jumps(self) -> int:
        return int(self.jump_times.size)

    def sizes(self) -> np.ndarray:
        if np.ndim(self.jump_size) == 0:
            return np.full(self.n_jumps, self.jump_size)
        return self.jump_size

    def value(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        cum = np.concatenate(([0.0], np.cumsum(self.sizes())))
        return cum[np.searchsorted(self.jump_times, s, side="right")] + self.drift * s

    def reflected(self, s) -> np.ndarray:
        """Walk minus its running infimum (started from 0)."""
        s = np.asarray(s, dtype=np.float64)
        sizes = self.sizes()
        pre = np.cumsum(sizes) - sizes + self.drift * self.jump_times
        run_min = np.minimum.accumulate(np.concatenate(([0.0], pre)))
        z = self.value(s)
        k = np.searchsorted(self.jump_times, s, side="right")
        return z - np.minimum(run_min[k], z)

    def scaled(self, factor: float) -> "JumpWalk":
        """Same jump times; jump sizes and drift multiplied by ``factor``."""
        return JumpWalk(
            self.jump_times, self.jump_size * factor, self.drift * factor, self.mass_unit
        )


@dataclass(frozen=True)
class ExcursionRecord:
    start: float
    end: float
    length: float
    area: float
    marks: int = 0


@dataclass(frozen=True, eq=False)
class ExcursionTable:
    """All excursions of a walk in chronological order, as parallel arrays."""

    start: np.ndarray
    length: np.ndarray
    area: np.ndarray
    n_jumps: np.ndarray

    @property
    def end(self) -> np.ndarray:
        return self.start + self.length

    def __len__(self) -> int:
        return int(self.start.size)

    def records(self, marks=None) -> list[ExcursionRecord]:
        if marks is None:
            marks = np.zeros(len(self), dtype=np.int64)
        return [
            ExcursionRecord(float(a), float(a + l), float(l), float(s), int(m))
            for a, l, s, m in zip(self.start, self.length, self.area, marks)
        ]


def sample_walk(params: ScalingParams, rng: np.random.Generator, scaled: bool = True) -> JumpWalk:
    """Sorted exponential jump times (mean ``n**(2/3)``) divided by ``q``.

    The scaled walk has jump size ``q * n**(-2/3)`` and drift ``-q``; the
    unscaled one has jump size ``n**(-2/3)`` and drift ``-1``.
    """
    n, q = params.n, params.q
    while True:
        xi = np.sort(rng.exponential(1.0 / params.vertex_mass, size=n))
        times = xi / q
        if n < 2 or np.all(np.diff(times) > 0):
            break
    unit = params.vertex_mass
    if scaled:
        return JumpWalk(times, q * unit, -q, unit)
    return JumpWalk(times, unit, -1.0, unit)


def excursion_table(walk: JumpWalk) -> ExcursionTable:
    if walk.n_jumps == 0:
        raise InvalidInputError("walk has no jumps")
    times = walk.jump_times
    rate = -walk.drift
    scalar = np.ndim(walk.jump_size) == 0
    sizes = walk.sizes()
    cum = np.cumsum(sizes)
    before = cum - sizes
    pre = before - rate * times
    prev_min = np.minimum.accumulate(np.concatenate(([0.0], pre[:-1])))
    opens = pre <= prev_min
    first = np.flatnonzero(opens)
    counts = np.diff(np.append(first, walk.n_jumps))
    if scalar:
        unit = walk.mass_unit if walk.mass_unit is not None else walk.jump_size / rate
        length = counts * unit
    else:
        length = np.add.reduceat(sizes, first) / rate
    start = times[first]

    exc = np.cumsum(opens) - 1
    if scalar:
        jumped = np.arange(1, walk.n_jumps + 1) - first[exc]
        height = jumped * walk.jump_size - rate * (times - start[exc])
    else:
        height = cum - before[first][exc] - rate * (times - start[exc])
    last = np.zeros(walk.n_jumps, dtype=bool)
    last[first[1:] - 1] = True
    last[-1] = True
    dt = np.empty_like(times)
    dt[:-1] = np.diff(times)
    dt[last] = height[last] / rate
    trapezoids = dt * (2.0 * height - rate * dt) / 2.0
    area = np.add.reduceat(trapezoids, first)
    return ExcursionTable(start, length, area, counts)


def decompose(walk: JumpWalk) -> list[ExcursionRecord]:
    """Excursions of the walk above its past infimum, chronologically."""
    return excursion_table(walk).records()


def order_excursions(excs: list[ExcursionRecord]) -> list[ExcursionRecord]:
    """Longest first; equal lengths by earlier start."""
    return sorted(excs, key=lambda e: (-e.length, e.start))


def poisson_marks(areas, rng: np.random.Generator) -> np.ndarray:
    return rng.poisson(np.asarray(areas, dtype=np.float64)).astype(np.int64)


def mark_excursions(excs: list[ExcursionRecord], rng: np.random.Generator) -> list[ExcursionRecord]:
    """Independent Poisson(area) mark counts."""
    marks = poisson_marks([e.area for e in excs], rng)
    return [replace(e, marks=int(m)) for e, m in zip(excs, marks)]


def mark_excursions_planar(
    walk: JumpWalk, excs: list[ExcursionRecord], rng: np.random.Generator
) -> list[ExcursionRecord]:
    """Reference marking: count unit-rate planar Poisson points under the
    reflected curve over each excursion. Same law as :func:`mark_excursions`.
    """
    out = []
    for e in excs:
        # reflected walk is maximal just after a jump
        inside = (walk.jump_times >= e.start) & (walk.jump_times < e.end)
        top = float(walk.reflected(walk.jump_times[inside]).max()) if inside.any() else 0.0
        k = rng.poisson(e.length * top)
        xs = rng.uniform(e.start, e.end, size=k)
        ys = rng.uniform(0.0, top, size=k)
        out.append(replace(e, marks=int(np.count_nonzero(ys < walk.reflected(xs)))))
    return out


def to_augmented(excs: list[ExcursionRecord]) -> AugmentedPartition:
    return canonicalize_arrays(
        np.array([e.length for e in excs], dtype=np.float64),
        np.array([e.marks for e in excs], dtype=np.int64),
    )


def first_excursion_stats(walk: JumpWalk, delta: float) -> tuple[float, float, bool]:
    """Length and area of the chronologically first excursion, and whether
    the length is below ``delta``."""
    table = excursion_table(walk)
    length = float(table.length[0])
    return length, float(table.area[0]), length < delta


def sample_state(params: ScalingParams, rng: np.random.Generator) -> AugmentedPartition:
    """One draw of (excursion lengths, Poisson marks) in canonical order."""
    table = excursion_table(sample_walk(params, rng))
    return canonicalize_arrays(table.length, poisson_marks(table.area, rng))
