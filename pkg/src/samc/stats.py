"""Two-sample KS, Monte Carlo confidence intervals, and Monte Carlo checks
of the random-vertex identity, the excursion-area bound and the
multigraph/simple-graph surplus gap.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .core import InvalidInputError, ScalingParams
from .graphsim import component_table, coupled_at, multigraph_at
from .replicas import stream

KS_ALPHA_01 = 1.628
Z_SIGMA = 3.0


@dataclass(frozen=True, eq=False)
class SampleSet:
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64).ravel())

    def __len__(self) -> int:
        return int(self.values.size)


class KSResult(NamedTuple):
    statistic: float
    critical: float

    @property
    def passed(self) -> bool:
        return self.statistic <= self.critical


def _values(x) -> np.ndarray:
    return x.values if isinstance(x, SampleSet) else np.asarray(x, dtype=np.float64).ravel()


def ks_critical(m: int, n: int, c_alpha: float = KS_ALPHA_01) -> float:
    return c_alpha * math.sqrt((m + n) / (m * n))


def ks_two_sample(a, b, c_alpha: float = KS_ALPHA_01) -> KSResult:
    """sup |F_a - F_b| over the pooled sample, exact in the presence of ties,
    with the asymptotic critical value ``c_alpha * sqrt((m+n)/(m n))``."""
    x = np.sort(_values(a))
    y = np.sort(_values(b))
    if x.size == 0 or y.size == 0:
        raise InvalidInputError("KS needs two nonempty samples")
    pooled = np.union1d(x, y)
    fx = np.searchsorted(x, pooled, side="right") / x.size
    fy = np.searchsorted(y, pooled, side="right") / y.size
    return KSResult(float(np.max(np.abs(fx - fy))), ks_critical(x.size, y.size, c_alpha))


def mc_mean_ci(samples, z: float = Z_SIGMA) -> tuple[float, float]:
    """Sample mean and ``z`` standard errors."""
    v = _values(samples)
    if v.size < 2:
        raise InvalidInputError("need at least two samples")
    return float(v.mean()), float(z * v.std(ddof=1) / math.sqrt(v.size))


def standard_error(samples) -> float:
    return mc_mean_ci(samples, z=1.0)[1]


def variance_se(samples) -> tuple[float, float]:
    """Sample variance and its large-sample standard error."""
    v = _values(samples)
    var = float(v.var(ddof=1))
    m4 = float(np.mean((v - v.mean()) ** 4))
    return var, math.sqrt(max(m4 - var**2, 0.0) / v.size)


@dataclass
class CheckReport:
    """Outcome of one Monte Carlo or deterministic check."""

    name: str
    estimates: dict
    standard_errors: dict
    threshold: float | None
    passed: bool
    replicas: int
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)

    def to_dict(self) -> dict:
        return _plain(asdict(self))

    def line(self) -> str:
        est = ", ".join(f"{k}={v:.6g}" for k, v in self.estimates.items())
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: {est}"


def _plain(obj):
    """Numpy scalars and arrays to built-in types, recursively."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.generic, np.ndarray)):
        return obj.tolist()
    return obj


def _within(diff: float, se: float, z: float = Z_SIGMA) -> bool:
    return abs(diff) <= z * se


def check_random_vertex_lemma(n: int, t: float, delta: float, reps: int, seed: int) -> CheckReport:
    """Compare ``E[f(C(V))]`` for a uniform vertex ``V`` with
    ``n**(-1/3) E[sum_i |C_i| f(C_i)]``, where ``f(C) = SP(C) 1{|C| < delta}``.
    """
    if n < 2 or reps < 100:
        raise InvalidInputError("need n >= 2 and reps >= 100")
    params = ScalingParams(n, t)
    rng = stream(seed, 1)
    lhs = np.empty(reps)
    rhs = np.empty(reps)
    for r in range(reps):
        table = component_table(multigraph_at(n, params.q, rng))
        masses = table.masses(n)
        f = np.where(masses < delta, table.surpluses, 0)
        rhs[r] = np.dot(masses, f) / params.cube_root
        lhs[r] = f[table.labels[rng.integers(n)]]
    l_mean, r_mean = float(lhs.mean()), float(rhs.mean())
    l_se, r_se = standard_error(lhs), standard_error(rhs)
    combined = math.hypot(l_se, r_se)
    return CheckReport(
        "random_vertex_lemma",
        {"lhs": l_mean, "rhs": r_mean, "diff": l_mean - r_mean},
        {"lhs": l_se, "rhs": r_se, "combined": combined},
        Z_SIGMA * combined,
        _within(l_mean - r_mean, combined),
        reps,
        seed,
        {"n": n, "t": t, "delta": delta},
    )


def first_excursion_areas(reps: int, horizon: float, rng: np.random.Generator):
    """First excursion of ``S_u - u`` (``S`` a unit Poisson process) above
    its past infimum, vectorized over replicas.

    Returns ``(start, length, area)``; lengths exceeding ``horizon`` are
    reported as ``inf`` with area ``nan`` since the walk is abandoned there.
    """
    start = rng.exponential(size=reps)
    # from the first arrival on, M = S - u + start begins at 1 and must hit 0
    height = np.ones(reps)
    elapsed = np.zeros(reps)
    area = np.zeros(reps)
    length = np.full(reps, np.inf)
    active = np.arange(reps)
    while active.size:
        h = height[active]
        gap = rng.exponential(size=active.size)
        hits = gap >= h
        run = np.where(hits, h, gap)
        area[active] += run * (2.0 * h - run) / 2.0
        elapsed[active] += run
        done = active[hits]
        length[done] = elapsed[done]
        height[active] = h - run + 1.0
        active = active[~hits]
        active = active[elapsed[active] <= horizon]
    area[np.isinf(length)] = np.nan
    return start, length, area


def check_area_bound(T: float, reps: int, seed: int) -> CheckReport:
    """Estimate ``E[area of first excursion * 1{length <= T}]`` and test
    that it does not exceed ``T`` (up to 3 SE)."""
    if T < 0:
        raise InvalidInputError("T must be nonnegative")
    start, length, area = first_excursion_areas(reps, T, stream(seed, 2))
    contrib = np.where(length <= T, np.nan_to_num(area), 0.0)
    est, se = float(contrib.mean()), standard_error(contrib)
    s_mean, s_se = float(start.mean()), standard_error(start)
    return CheckReport(
        f"area_bound[T={T:g}]",
        {"estimate": est, "first_arrival_mean": s_mean},
        {"estimate": se, "first_arrival_mean": s_se},
        T + Z_SIGMA * se,
        est <= T + Z_SIGMA * se,
        reps,
        seed,
        {"T": T},
    )


def check_surplus_gap_trend(n_list: Sequence[int], t: float, reps: int, seed: int) -> CheckReport:
    """Mean surplus gap of the largest component between the multigraph and
    its simple projection, against the per-component upper bound
    ``1.5 (q/n^(2/3)) E[X1] + (q^2 / (2 n^(4/3))) E[X1^2]``.
    """
    n_list = list(n_list)
    if len(n_list) < 2 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise InvalidInputError("n_list must be increasing with at least two entries")
    estimates, ses, params = {}, {}, {"t": t, "n_list": n_list}
    pathwise_ok = True
    within_bound = True
    means = []
    for k, n in enumerate(n_list):
        p = ScalingParams(n, t)
        rng = stream(seed, 3, k)
        gap = np.empty(reps)
        x1 = np.empty(reps)
        for r in range(reps):
            c = coupled_at(n, p.q, rng)
            pathwise_ok &= bool(np.all(c.gaps >= 0))
            gap[r] = c.gaps[0]
            x1[r] = c.masses[0]
        mean, se = float(gap.mean()), standard_error(gap)
        bound = 1.5 * p.q * p.vertex_mass * x1.mean() + p.q**2 / (
            2.0 * p.cube_root**4
        ) * np.mean(x1**2)
        within_bound &= mean <= bound + Z_SIGMA * se
        means.append(mean)
        estimates[f"gap_n{n}"] = mean
        estimates[f"bound_n{n}"] = float(bound)
        ses[f"gap_n{n}"] = se
    decreasing = means[-1] < means[0]
    estimates["pathwise_ok"] = float(pathwise_ok)
    return CheckReport(
        "surplus_gap_trend",
        estimates,
        ses,
        None,
        bool(pathwise_ok and decreasing and within_bound),
        reps,
        seed,
        params,
    )
