import math

import numpy as np
import pytest

from samc.chain import ChainState, run, run_observed, step
from samc.core import InvalidInputError, ScalingParams, canonicalize
from samc.stats import standard_error


def test_single_block_only_gains_surplus(rng):
    state = ChainState.from_pairs([(2.0, 1)])
    holds = []
    for _ in range(20000):
        nxt, hold = step(state, rng)
        assert nxt.blocks.pairs() == [(2.0, 2)]
        holds.append(hold)
    holds = np.array(holds)
    # rate x^2/2 = 2
    assert abs(holds.mean() - 0.5) <= 3 * standard_error(holds)


def test_merge_probability(rng):
    state = ChainState.from_pairs([(2.0, 0), (1.0, 0)])
    merged = np.array([len(step(state, rng)[0]) == 1 for _ in range(100_000)], dtype=float)
    assert abs(merged.mean() - 4 / 9) <= 3 * standard_error(merged)


def test_holding_time_all_unit_blocks(rng):
    n = 10
    state = ChainState.from_pairs([(1.0, 0)] * n)
    holds = np.array([step(state, rng)[1] for _ in range(100_000)])
    assert abs(holds.mean() - 2 / n**2) <= 3 * standard_error(holds)


def test_two_block_merge_time(rng):
    x1, x2 = 1.5, 0.5
    start = ChainState.from_pairs([(x1, 0), (x2, 0)])
    times = []
    for _ in range(20000):
        state, clock = start, 0.0
        while len(state) == 2:
            state, hold = step(state, rng)
            clock += hold
        times.append(clock)
    times = np.array(times)
    assert abs(times.mean() - 1 / (x1 * x2)) <= 3 * standard_error(times)


def test_step_invariants(rng):
    state = ChainState.initial(ScalingParams(40))
    total = state.total_mass
    for _ in range(60):
        nxt, _ = step(state, rng)
        assert nxt.clock > state.clock
        merged = len(nxt) == len(state) - 1 and nxt.total_surplus == state.total_surplus
        surplus = len(nxt) == len(state) and nxt.total_surplus == state.total_surplus + 1
        assert merged or surplus
        assert nxt.total_mass == total
        assert canonicalize(nxt.blocks) == nxt.blocks
        state = nxt


def test_run_zero_duration(rng):
    start = ChainState.initial(ScalingParams(20))
    assert run(start, 0.0, rng).blocks == start.blocks


def test_run_conserves_mass_exactly(rng):
    params = ScalingParams(30)
    start = ChainState.initial(params)
    for _ in range(200):
        end = run(start, params.q, rng)
        assert end.total_mass == start.total_mass
        assert end.clock == pytest.approx(params.q)
        assert end.total_surplus >= 0


def test_run_observed(rng):
    start = ChainState.initial(ScalingParams(25))
    states = run_observed(start, [0.5, 1.0, 3.0], rng)
    assert [s.clock for s in states] == [0.5, 1.0, 3.0]
    assert all(a.total_surplus <= b.total_surplus for a, b in zip(states, states[1:]))
    assert all(len(a) >= len(b) for a, b in zip(states, states[1:]))
    with pytest.raises(InvalidInputError):
        run_observed(start, [1.0, 0.5], rng)


def test_run_matches_step_loop_in_law(rng):
    start = ChainState.from_pairs([(1.0, 0), (0.5, 0), (0.5, 0), (0.25, 1)])
    duration = 0.8
    fast = np.array([run(start, duration, rng).total_surplus for _ in range(20000)])
    slow = []
    for _ in range(20000):
        state = start
        while True:
            nxt, _ = step(state, rng)
            if nxt.clock > duration:
                break
            state = nxt
        slow.append(state.total_surplus)
    slow = np.array(slow)
    se = math.hypot(standard_error(fast), standard_error(slow))
    assert abs(fast.mean() - slow.mean()) <= 3 * se


def test_errors(rng):
    with pytest.raises(InvalidInputError):
        step(ChainState.from_pairs([]), rng)
    with pytest.raises(InvalidInputError):
        run(ChainState.from_pairs([(1.0, 0)]), -1.0, rng)
    with pytest.raises(InvalidInputError):
        ChainState(canonicalize([(0.7, 0)]), 0.0, unit=0.5)
