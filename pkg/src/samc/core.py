"""Mass and mass/surplus partitions, the two metrics on them, and the
critical-window scaling parameters shared by all samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's precondition."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MassPartition:
    """Finite nonincreasing vector of positive masses (implicitly zero-padded)."""

    masses: np.ndarray

    def __post_init__(self):
        m = np.array(self.masses, dtype=np.float64).ravel()
        if m.size and (np.any(m <= 0) or np.any(np.diff(m) > 0)):
            raise InvalidInputError("masses must be strictly positive and nonincreasing")
        object.__setattr__(self, "masses", _frozen(m))

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "MassPartition":
        """Sort descending and drop zeros. Negative entries are rejected."""
        m = np.asarray(list(values), dtype=np.float64)
        if np.any(m < 0):
            raise InvalidInputError("negative mass")
        m = m[m > 0]
        return cls(np.sort(m)[::-1])

    def __len__(self) -> int:
        return int(self.masses.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MassPartition):
            return NotImplemented
        return np.array_equal(self.masses, other.masses)


@dataclass(frozen=True, eq=False)
class AugmentedPartition:
    """Canonically ordered (mass, surplus) pairs.

    Masses are nonincreasing and, among equal masses, surpluses are
    nonincreasing. Build instances with :func:`canonicalize` unless the
    input is already known to be in canonical order.
    """

    masses: np.ndarray
    surpluses: np.ndarray

    def __post_init__(self):
        m = np.array(self.masses, dtype=np.float64).ravel()
        s = np.array(self.surpluses, dtype=np.int64).ravel()
        if m.shape != s.shape:
            raise InvalidInputError("masses and surpluses must have equal length")
        if m.size:
            if np.any(m <= 0) or np.any(s < 0):
                raise InvalidInputError("masses must be positive and surpluses nonnegative")
            dm = np.diff(m)
            if np.any(dm > 0) or np.any((dm == 0) & (np.diff(s) > 0)):
                raise InvalidInputError("pairs are not in canonical order")
        object.__setattr__(self, "masses", _frozen(m))
        object.__setattr__(self, "surpluses", _frozen(s))

    def __len__(self) -> int:
        return int(self.masses.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AugmentedPartition):
            return NotImplemented
        return np.array_equal(self.masses, other.masses) and np.array_equal(
            self.surpluses, other.surpluses
        )

    def pairs(self) -> list[tuple[float, int]]:
        return [(float(x), int(k)) for x, k in zip(self.masses, self.surpluses)]

    def mass_partition(self) -> MassPartition:
        return MassPartition(self.masses)

    @classmethod
    def empty(cls) -> "AugmentedPartition":
        return cls(np.empty(0), np.empty(0, dtype=np.int64))


def canonicalize(raw: Sequence[tuple[float, int]]) -> AugmentedPartition:
    """Sort (mass, surplus) pairs into canonical order.

    Zero-mass pairs are dropped. Sorting is by mass descending, then surplus
    descending; pairs equal in both keep their input order.
    """
    if isinstance(raw, AugmentedPartition):
        return raw
    if len(raw) == 0:
        return AugmentedPartition.empty()
    masses = np.array([x for x, _ in raw], dtype=np.float64)
    surpluses = np.array([n for _, n in raw])
    return canonicalize_arrays(masses, surpluses)


def canonicalize_arrays(masses, surpluses) -> AugmentedPartition:
    """Array form of :func:`canonicalize`."""
    m = np.asarray(masses, dtype=np.float64).ravel()
    s_raw = np.asarray(surpluses).ravel()
    if m.shape != s_raw.shape:
        raise InvalidInputError("masses and surpluses must have equal length")
    if np.any(m < 0) or np.any(s_raw < 0):
        raise InvalidInputError("negative mass or surplus")
    if s_raw.size and np.any(s_raw != np.floor(s_raw)):
        raise InvalidInputError("surpluses must be integers")
    s = s_raw.astype(np.int64)
    keep = m > 0
    if not np.all(keep):
        m, s = m[keep], s[keep]
    # lexsort is stable: last key is primary
    order = np.lexsort((-s, -m))
    return AugmentedPartition(m[order], s[order])


def _padded(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    size = max(a.size, b.size)
    pa = np.zeros(size)
    pb = np.zeros(size)
    pa[: a.size] = a
    pb[: b.size] = b
    return pa, pb


def _masses(x) -> np.ndarray:
    if isinstance(x, (MassPartition, AugmentedPartition)):
        return x.masses
    return np.asarray(x, dtype=np.float64).ravel()


def l2_distance(a, b) -> float:
    """l2 distance between two zero-padded mass vectors."""
    pa, pb = _padded(_masses(a), _masses(b))
    return float(math.sqrt(np.sum((pa - pb) ** 2)))


def du_distance(a, b) -> float:
    """l2 distance of masses plus l1 distance of mass-weighted surpluses."""
    a = canonicalize(a)
    b = canonicalize(b)
    xa, xb = _padded(a.masses, b.masses)
    na, nb = _padded(a.surpluses.astype(np.float64), b.surpluses.astype(np.float64))
    return float(math.sqrt(np.sum((xa - xb) ** 2)) + np.sum(np.abs(xa * na - xb * nb)))


def p_of_time(t: float) -> float:
    """Edge probability of the continuous-time graph at time ``t``."""
    if t < 0:
        raise InvalidInputError("t must be nonnegative")
    return float(-math.expm1(-t))


def vertex_mass(n: int) -> float:
    """``n**(-2/3)``; every sampler derives masses from this one value."""
    return 1.0 / float(np.cbrt(n)) ** 2


@dataclass(frozen=True)
class ScalingParams:
    """Critical-window parameters for ``n`` vertices of mass ``n**(-2/3)``.

    The rescaled observation time is ``q = n**(1/3) + t``.
    """

    n: int
    t: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInputError("n must be a positive integer")
        object.__setattr__(self, "n", int(self.n))
        if not self.q > 0:
            raise InvalidInputError(f"t={self.t} gives q <= 0 for n={self.n}")

    @property
    def cube_root(self) -> float:
        return float(np.cbrt(self.n))

    @property
    def vertex_mass(self) -> float:
        return vertex_mass(self.n)

    @property
    def q(self) -> float:
        return self.cube_root + self.t

    @property
    def sigma1(self) -> float:
        return self.cube_root

    @property
    def sigma2(self) -> float:
        return 1.0 / self.cube_root

    @property
    def sigma3(self) -> float:
        # equals 1/n; written this way so sigma3 / sigma2**3 == 1 holds in floats
        return self.sigma2**3
