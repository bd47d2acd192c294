import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from samc.core import InvalidInputError, ScalingParams
from samc.graphsim import (
    ComponentSummary,
    GraphSample,
    UnionFind,
    component_table,
    components,
    coupled_at,
    multigraph_at,
    multigraph_naive,
    project_simple,
    psi_embedding,
    sample_coupled_pair,
    sample_multigraph,
)
from samc.stats import ks_two_sample, standard_error


def graph(n, pairs, mult=None, loops=None, kind="multigraph"):
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    mult = np.ones(len(pairs), dtype=np.int64) if mult is None else mult
    loops = np.zeros(n, dtype=np.int64) if loops is None else loops
    return GraphSample(n, pairs, mult, loops, kind)


def scipy_components(g):
    """(sizes, edges) per component from scipy, as a sorted multiset."""
    a, b = g.pairs.T if len(g.pairs) else (np.empty(0, int), np.empty(0, int))
    adj = coo_matrix((np.ones(a.size), (a, b)), shape=(g.n, g.n))
    k, labels = connected_components(adj, directed=False)
    sizes = np.bincount(labels, minlength=k)
    edges = np.bincount(labels[a], weights=g.multiplicity, minlength=k)
    edges = edges + np.bincount(labels, weights=g.loops, minlength=k)
    return sorted(zip(sizes.tolist(), np.rint(edges).astype(int).tolist()), reverse=True)


def test_triangle_plus_isolated():
    g = graph(4, [(0, 1), (1, 2), (0, 2)], kind="simple")
    assert [(c.size, c.surplus) for c in components(g)] == [(3, 1), (1, 0)]


def test_tree_has_no_surplus():
    g = graph(6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)], kind="simple")
    assert [(c.size, c.surplus) for c in components(g)] == [(6, 0)]


def test_double_edge_and_loop():
    loops = np.array([1, 0, 0])
    g = graph(3, [(0, 1)], mult=np.array([2]), loops=loops)
    assert [(c.size, c.surplus) for c in components(g)] == [(2, 2), (1, 0)]


def test_component_mass_uses_vertex_count():
    g = graph(8, [(0, 1), (1, 2)])
    assert components(g)[0] == ComponentSummary(3, 0.75, 0)


def test_equal_sizes_ordered_by_surplus():
    g = graph(4, [(0, 1), (2, 3)], mult=np.array([1, 3]))
    assert [(c.size, c.surplus) for c in components(g)] == [(2, 2), (2, 0)]


def test_graph_sample_validation():
    with pytest.raises(InvalidInputError):
        graph(3, [(1, 0)])
    with pytest.raises(InvalidInputError):
        graph(3, [(0, 3)])
    with pytest.raises(InvalidInputError):
        graph(3, [(0, 1)], mult=np.array([2]), kind="simple")
    with pytest.raises(InvalidInputError):
        graph(3, [(0, 1)], loops=np.array([1, 0, 0]), kind="simple")


def test_union_find():
    uf = UnionFind(5)
    assert uf.union(0, 1) and uf.union(3, 4) and uf.union(1, 4)
    assert not uf.union(0, 3)
    roots = uf.roots()
    assert len({roots[i] for i in (0, 1, 3, 4)}) == 1 and roots[2] == 2


@given(st.integers(1, 30), st.lists(st.tuples(st.integers(0, 29), st.integers(0, 29)), max_size=60))
def test_components_match_scipy(n, edges):
    edges = [(min(a, b), max(a, b)) for a, b in edges if a < n and b < n and a != b]
    keys, mult = np.unique(np.array([a * n + b for a, b in edges], dtype=np.int64), return_counts=True)
    pairs = np.stack((keys // n, keys % n), axis=1)
    loops = np.arange(n) % 3 == 0
    g = graph(n, pairs, mult, loops.astype(np.int64))
    table = component_table(g)
    ours = sorted(zip(table.sizes.tolist(), table.edges.tolist()), reverse=True)
    assert ours == scipy_components(g)
    assert np.all(table.surpluses >= 0)
    # labels point at the right component
    assert np.array_equal(np.bincount(table.labels, minlength=table.sizes.size), table.sizes)


def test_psi_embedding():
    params = ScalingParams(8)
    comps = [ComponentSummary(1, 0.25, 0), ComponentSummary(3, 0.75, 1)]
    assert psi_embedding(comps, params).pairs() == [(0.75, 1), (0.25, 0)]
    assert len(psi_embedding([], params)) == 0
    tied = [ComponentSummary(2, 0.5, 0), ComponentSummary(2, 0.5, 2)]
    assert psi_embedding(tied, params).pairs() == [(0.5, 2), (0.5, 0)]


def test_single_vertex_has_only_loops(rng):
    loops = [multigraph_at(1, 2.0, rng) for _ in range(20000)]
    assert all(len(g.pairs) == 0 for g in loops)
    counts = np.array([g.loops[0] for g in loops])
    # Poisson(q/2) with q = 2
    assert abs(counts.mean() - 1.0) <= 3 * standard_error(counts)


def test_q_zero_is_empty(rng):
    g = multigraph_at(50, 0.0, rng)
    assert g.edge_count == 0
    c = coupled_at(50, 0.0, rng)
    assert c.gap_statistic == 0 and np.all(c.gaps == 0)


def test_pair_multiplicity_mean(rng):
    q = 2 ** (4 / 3)
    mult = np.array([multigraph_at(2, q, rng).multiplicity.sum() for _ in range(100_000)])
    assert abs(mult.mean() - 1.0) <= 0.01


def test_projection_edge_probability(rng):
    q = math.log(2) * 2 ** (4 / 3)
    present = np.array([len(project_simple(multigraph_at(2, q, rng)).pairs) for _ in range(100_000)])
    assert abs(present.mean() - 0.5) <= 0.005


def test_project_simple():
    mg = graph(3, [(0, 1)], mult=np.array([3]), loops=np.array([2, 0, 0]))
    s = project_simple(mg)
    assert s.kind == "simple" and s.multiplicity.tolist() == [1] and s.loops.sum() == 0
    assert project_simple(graph(4, [])).edge_count == 0
    with pytest.raises(InvalidInputError):
        project_simple(s)


def test_projection_preserves_partition(rng):
    for _ in range(20):
        mg = multigraph_at(300, 8.0, rng)
        a, b = component_table(mg), component_table(project_simple(mg))
        assert np.array_equal(np.sort(a.sizes), np.sort(b.sizes))
        # same partition: label maps agree up to renaming
        pairs = set(zip(a.labels.tolist(), b.labels.tolist()))
        assert len(pairs) == a.sizes.size


def test_simple_surplus_bound(rng):
    for _ in range(20):
        for c in components(project_simple(multigraph_at(30, 10.0, rng))):
            assert c.surplus <= c.size * (c.size - 1) // 2 - (c.size - 1)


def test_coupled_sample(rng):
    params = ScalingParams(200, 1.0)
    for _ in range(50):
        c = sample_coupled_pair(params, rng)
        assert np.all(c.gaps >= 0)
        assert c.sizes.sum() == 200
        assert c.gap_statistic == pytest.approx(float(np.dot(c.masses, c.gaps)))
        simple = c.simple_summaries()
        assert all(
            (x.size, x.surplus) >= (y.size, y.surplus) for x, y in zip(simple, simple[1:])
        )
        assert sum(s.surplus for s in c.multi_summaries()) >= sum(s.surplus for s in simple)


def test_coupled_gap_statistic_baseline(rng):
    stats = np.array([coupled_at(100, ScalingParams(100).q, rng).gap_statistic for _ in range(10_000)])
    assert 0 < stats.mean() < np.inf


def test_masses_sum_to_cube_root(rng):
    for n in (10, 1000, 12345):
        params = ScalingParams(n)
        table = component_table(sample_multigraph(params, rng))
        assert table.sizes.sum() == n
        assert table.masses(n).sum() == pytest.approx(params.sigma1, rel=1e-9)


def test_mean_edge_count(rng):
    n, q = 40, 5.0
    edges = np.array([multigraph_at(n, q, rng).multiplicity.sum() for _ in range(20000)])
    expected = n * (n - 1) / 2 * q / n ** (4 / 3)
    assert abs(edges.mean() - expected) <= 3 * standard_error(edges)


@pytest.mark.parametrize("n", [4, 7])
def test_superposition_matches_naive(rng, n):
    q = 3.0
    sup = [multigraph_at(n, q, rng) for _ in range(10000)]
    nai = [multigraph_naive(n, q, rng) for _ in range(10000)]
    largest = lambda gs: [component_table(g).sizes[0] for g in gs]  # noqa: E731
    assert ks_two_sample(largest(sup), largest(nai)).passed
    loops_s = np.array([g.loops.sum() for g in sup])
    loops_n = np.array([g.loops.sum() for g in nai])
    se = math.hypot(standard_error(loops_s), standard_error(loops_n))
    assert abs(loops_s.mean() - loops_n.mean()) <= 3 * se
