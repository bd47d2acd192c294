"""Cross-sampler validation suite.

Each ``check_*`` function is a deterministic function of its parameters and
``seed`` and returns one or more :class:`~samc.stats.CheckReport`.
:func:`run_suite` runs them all at full or reduced ("quick") size.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .chain import ChainState, run
from .core import ScalingParams, canonicalize_arrays, vertex_mass
from .graphsim import _vertex_roots, component_table, coupled_at, multigraph_at, multigraph_naive
from .limit import LimitConfig, GridPath, grid_excursion_table, reflect_grid, sample_wt
from .replicas import stream
from .sbfw import excursion_table, poisson_marks, sample_walk
from .stats import (
    Z_SIGMA,
    CheckReport,
    check_area_bound,
    check_random_vertex_lemma,
    check_surplus_gap_trend,
    ks_two_sample,
    standard_error,
    variance_se,
)


def _largest_graph(params: ScalingParams, rng) -> tuple[float, int]:
    table = component_table(multigraph_at(params.n, params.q, rng))
    return float(table.masses(params.n)[0]), int(table.surpluses[0])


def _largest_sbfw(params: ScalingParams, rng) -> tuple[float, int]:
    table = excursion_table(sample_walk(params, rng))
    state = canonicalize_arrays(table.length, poisson_marks(table.area, rng))
    return float(state.masses[0]), int(state.surpluses[0])


def check_exact_law(n: int, t: float, reps: int, seed: int) -> list[CheckReport]:
    """Largest excursion (length, marks) of the walk against the largest
    multigraph component (mass, surplus): KS on the first coordinate and
    mean/variance agreement on the second."""
    params = ScalingParams(n, t)
    key = (4, n, int(round(1000 * t)) + 10**6)
    rng_g, rng_w = stream(seed, *key, 0), stream(seed, *key, 1)
    g = np.array([_largest_graph(params, rng_g) for _ in range(reps)])
    w = np.array([_largest_sbfw(params, rng_w) for _ in range(reps)])
    ks = ks_two_sample(w[:, 0], g[:, 0])
    setting = {"n": n, "t": t}
    law = CheckReport(
        f"exact_law_ks[n={n},t={t:g}]",
        {"ks": ks.statistic},
        {},
        ks.critical,
        ks.passed,
        reps,
        seed,
        setting,
    )
    gm, gs = float(g[:, 1].mean()), standard_error(g[:, 1])
    wm, ws = float(w[:, 1].mean()), standard_error(w[:, 1])
    gv, gvs = variance_se(g[:, 1])
    wv, wvs = variance_se(w[:, 1])
    mean_se, var_se = math.hypot(gs, ws), math.hypot(gvs, wvs)
    surplus = CheckReport(
        f"joint_surplus[n={n},t={t:g}]",
        {"graph_mean": gm, "walk_mean": wm, "graph_var": gv, "walk_var": wv},
        {"mean": mean_se, "var": var_se},
        Z_SIGMA,
        abs(gm - wm) <= Z_SIGMA * mean_se and abs(gv - wv) <= Z_SIGMA * var_se,
        reps,
        seed,
        setting,
    )
    return [law, surplus]


def check_chain_graph(n: int, t: float, reps: int, seed: int) -> list[CheckReport]:
    """Gillespie chain run for time ``q`` from ``n`` unit blocks against the
    multigraph at ``q``: KS on the largest mass, total-surplus means."""
    params = ScalingParams(n, t)
    rng_c, rng_g = stream(seed, 5, n, 0), stream(seed, 5, n, 1)
    start = ChainState.initial(params)
    chain_max = np.empty(reps)
    chain_sp = np.empty(reps)
    for r in range(reps):
        state = run(start, params.q, rng_c)
        chain_max[r] = state.blocks.masses[0]
        chain_sp[r] = state.total_surplus
    graph_max = np.empty(reps)
    graph_sp = np.empty(reps)
    for r in range(reps):
        table = component_table(multigraph_at(n, params.q, rng_g))
        graph_max[r] = table.masses(n)[0]
        graph_sp[r] = table.surpluses.sum()
    ks = ks_two_sample(chain_max, graph_max)
    se = math.hypot(standard_error(chain_sp), standard_error(graph_sp))
    diff = float(chain_sp.mean() - graph_sp.mean())
    setting = {"n": n, "t": t}
    return [
        CheckReport("chain_graph_ks", {"ks": ks.statistic}, {}, ks.critical, ks.passed, reps, seed, setting),
        CheckReport(
            "chain_graph_surplus",
            {"chain_mean": float(chain_sp.mean()), "graph_mean": float(graph_sp.mean())},
            {"combined": se},
            Z_SIGMA * se,
            abs(diff) <= Z_SIGMA * se,
            reps,
            seed,
            setting,
        ),
    ]


def check_invariants(
    seed: int,
    walks: int = 100,
    walk_sizes=(1000, 100_000),
    graph_reps=((1000, 100), (100_000, 3)),
) -> list[CheckReport]:
    """Deterministic identities on freshly sampled objects."""
    reports = []
    rng = stream(seed, 6)
    worst = 0.0
    for n in walk_sizes:
        params = ScalingParams(n, 0.0)
        for _ in range(walks):
            total = math.fsum(excursion_table(sample_walk(params, rng)).length)
            worst = max(worst, abs(total / params.sigma1 - 1.0))
    reports.append(
        CheckReport("tiling_excursion_lengths", {"max_rel_error": worst}, {}, 1e-9, worst <= 1e-9,
                    walks * len(walk_sizes), seed, {"n": list(walk_sizes)})
    )

    mass_err = 0.0
    bad_surplus = 0
    bad_gap = 0
    total = 0
    for n, reps in graph_reps:
        params = ScalingParams(n, 0.0)
        for _ in range(reps):
            g = multigraph_at(n, params.q, rng)
            table = component_table(g)
            mass_err = max(mass_err, abs(math.fsum(table.masses(n)) / params.sigma1 - 1.0))
            sp = table.surpluses
            # independent identity: total surplus = edges - n + #components
            bad_surplus += int(np.any(sp < 0) or sp.sum() != g.edge_count - n + sp.size)
            total += 1
        for _ in range(reps):
            bad_gap += int(np.any(coupled_at(n, params.q, rng).gaps < 0))
    reports.append(
        CheckReport("component_mass_total", {"max_rel_error": mass_err}, {}, 1e-9, mass_err <= 1e-9,
                    total, seed, {})
    )
    reports.append(
        CheckReport("surplus_formula", {"violations": float(bad_surplus)}, {}, 0.0, bad_surplus == 0,
                    total, seed, {})
    )
    reports.append(
        CheckReport("coupling_pathwise", {"violations": float(bad_gap)}, {}, 0.0, bad_gap == 0,
                    total, seed, {})
    )

    bad_canon = 0
    for _ in range(200):
        k = int(rng.integers(0, 12))
        masses = rng.integers(0, 4, size=k).astype(float) * 0.5
        surpluses = rng.integers(0, 3, size=k)
        once = canonicalize_arrays(masses, surpluses)
        bad_canon += int(canonicalize_arrays(once.masses, once.surpluses) != once)
    reports.append(
        CheckReport("canonicalize_idempotent", {"violations": float(bad_canon)}, {}, 0.0, bad_canon == 0,
                    200, seed, {})
    )
    return reports


def check_key_lemma(n: int, deltas, reps: int, seed: int, t: float = 0.0) -> list[CheckReport]:
    """``n**(1/3) E[area of first excursion * 1{T1 < delta}] <= delta``."""
    params = ScalingParams(n, t)
    rng = stream(seed, 7, n)
    lengths = np.empty(reps)
    areas = np.empty(reps)
    for r in range(reps):
        table = excursion_table(sample_walk(params, rng))
        lengths[r] = table.length[0]
        areas[r] = table.area[0]
    reports = []
    for delta in deltas:
        contrib = params.cube_root * areas * (lengths < delta)
        est, se = float(contrib.mean()), standard_error(contrib)
        reports.append(
            CheckReport(
                f"key_lemma[n={n},delta={delta:g}]",
                {"estimate": est},
                {"estimate": se},
                delta + Z_SIGMA * se,
                est <= delta + Z_SIGMA * se,
                reps,
                seed,
                {"n": n, "t": t, "delta": delta},
            )
        )
    return reports


def check_limit_consistency(
    n: int, config: LimitConfig, reps: int, seed: int, tolerance: float | None = 0.1
) -> list[CheckReport]:
    """Largest excursion of the walk at ``n`` against the grid limit sampler.

    ``tolerance=None`` uses the KS critical value for the replica count.

    Each grid path is drawn at half the configured step and decimated, so the
    step-halving sensitivity is measured on common Brownian paths.
    """
    rng_w, rng_l = stream(seed, 8, 0), stream(seed, 8, 1)
    params = ScalingParams(n, config.t)
    walk = np.array([excursion_table(sample_walk(params, rng_w)).length.max() for _ in range(reps)])
    fine_cfg = LimitConfig(config.t, config.horizon, config.step / 2, config.min_excursion_length)
    coarse = np.zeros(reps)
    fine = np.zeros(reps)
    for r in range(reps):
        path = sample_wt(fine_cfg, rng_l)
        for out, p in ((fine, path), (coarse, GridPath(config.step, path.values[::2]))):
            exc = grid_excursion_table(reflect_grid(p), config.min_excursion_length)
            out[r] = exc.length[0] if len(exc) else 0.0
    ks = ks_two_sample(walk, coarse)
    if tolerance is None:
        tolerance = ks.critical
    shift = float(coarse.mean() - fine.mean())
    se = standard_error(coarse)
    setting = {"n": n, "t": config.t, "step": config.step, "horizon": config.horizon,
               "eps": config.min_excursion_length}
    return [
        CheckReport(
            "limit_consistency_ks",
            {"ks": ks.statistic, "walk_mean": float(walk.mean()), "grid_mean": float(coarse.mean())},
            {},
            tolerance,
            ks.statistic <= tolerance,
            reps,
            seed,
            setting,
        ),
        CheckReport(
            "limit_step_halving",
            {"mean_shift": shift, "fine_mean": float(fine.mean())},
            {"grid_mean": se},
            se,
            abs(shift) < se,
            reps,
            seed,
            setting,
        ),
    ]


def _largest_size(g) -> int:
    return int(np.bincount(_vertex_roots(g.n, g.pairs)).max())


def check_superposition(n: int, q: float, reps: int, seed: int, tolerance: float = 0.02) -> list[CheckReport]:
    """Superposition sampler against the per-pair reference sampler."""
    unit = vertex_mass(n)
    out = {}
    for key, sampler in (("superposition", multigraph_at), ("naive", multigraph_naive)):
        rng = stream(seed, 9, 0 if key == "naive" else 1)
        largest = np.empty(reps)
        edges = np.empty(reps)
        for r in range(reps):
            g = sampler(n, q, rng)
            largest[r] = _largest_size(g) * unit
            edges[r] = g.multiplicity.sum()
        out[key] = (largest, edges)
    ks = ks_two_sample(out["superposition"][0], out["naive"][0])
    e_sup, e_naive = out["superposition"][1], out["naive"][1]
    se = math.hypot(standard_error(e_sup), standard_error(e_naive))
    expected = 0.5 * n * (n - 1) * q / np.cbrt(n) ** 4
    setting = {"n": n, "q": q}
    return [
        CheckReport("superposition_ks", {"ks": ks.statistic}, {}, tolerance, ks.statistic <= tolerance,
                    reps, seed, setting),
        CheckReport(
            "superposition_edge_mean",
            {"superposition": float(e_sup.mean()), "naive": float(e_naive.mean()), "exact": float(expected)},
            {"combined": se},
            Z_SIGMA * se,
            abs(e_sup.mean() - e_naive.mean()) <= Z_SIGMA * se
            and abs(e_sup.mean() - expected) <= Z_SIGMA * standard_error(e_sup),
            reps,
            seed,
            setting,
        ),
    ]


FULL = dict(law_reps=2000, chain_reps=2000, lemma_reps=5000, area_reps=100_000,
            key_reps=20_000, gap_reps=4000, limit_reps=2000, sup_reps=100_000,
            limit_step=1e-4, limit_tol=0.1, walks=100, walk_sizes=(1000, 100_000),
            graph_reps=((1000, 100), (100_000, 3)))
QUICK = dict(law_reps=200, chain_reps=200, lemma_reps=300, area_reps=5000,
             key_reps=1000, gap_reps=200, limit_reps=200, sup_reps=2000,
             limit_step=1e-3, limit_tol=None, walks=5, walk_sizes=(1000,), graph_reps=((1000, 5),))


def criteria(seed: int, quick: bool = False) -> list[tuple[str, Callable[[], list[CheckReport]]]]:
    """The acceptance criteria as (label, thunk) pairs, in order."""
    s = QUICK if quick else FULL
    exact: list[CheckReport] = []

    def exact_law(kind: str) -> list[CheckReport]:
        # criteria 1 and 2 read the same draws
        if not exact:
            exact.extend(
                rep for n in (50, 200) for t in (-1.0, 0.0, 1.0)
                for rep in check_exact_law(n, t, s["law_reps"], seed)
            )
        return [rep for rep in exact if rep.name.startswith(kind)]

    return [
        ("1 exact-law coupling", lambda: exact_law("exact_law_ks")),
        ("2 joint surplus law", lambda: exact_law("joint_surplus")),
        ("3 chain vs graph", lambda: check_chain_graph(30, 0.0, s["chain_reps"], seed)),
        ("4 exact invariants", lambda: check_invariants(
            seed, s["walks"], s["walk_sizes"], s["graph_reps"])),
        ("5 random vertex lemma", lambda: [check_random_vertex_lemma(200, 0.0, 0.5, s["lemma_reps"], seed)]),
        ("6 area bound", lambda: [check_area_bound(T, s["area_reps"], seed) for T in (1.0, 5.0, 10.0)]),
        ("7 key lemma", lambda: [
            rep for n in (100, 1000) for rep in check_key_lemma(n, (0.1, 0.5), s["key_reps"], seed)
        ]),
        ("8 surplus gap trend", lambda: [
            check_surplus_gap_trend((100, 400, 1600), 0.0, s["gap_reps"], seed)
        ]),
        ("9 limit consistency", lambda: check_limit_consistency(
            5000, LimitConfig(0.0, 10.0, s["limit_step"], 1e-3 if not quick else 1e-2),
            s["limit_reps"], seed, s["limit_tol"])),
        ("10 superposition oracle", lambda: check_superposition(6, 3.0, s["sup_reps"], seed)),
    ]


def run_suite(seed: int, quick: bool = False) -> list[CheckReport]:
    return [rep for _, thunk in criteria(seed, quick) for rep in thunk()]
