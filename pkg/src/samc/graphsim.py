"""Fixed-time samples of the mass-rescaled Erdős–Rényi multigraph and of the
simple graph obtained by keeping only the first edge between each pair.

Vertices carry mass ``n**(-2/3)`` and every unordered pair of distinct
vertices receives a Poisson(q / n**(4/3)) number of edges; every vertex
receives a Poisson(q / (2 n**(4/3))) number of self-loops. Vertices are
indexed ``0 .. n-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import (
    AugmentedPartition,
    InvalidInputError,
    ScalingParams,
    canonicalize_arrays,
    vertex_mass,
)

Kind = Literal["multigraph", "simple"]


@dataclass(frozen=True, eq=False)
class GraphSample:
    """Undirected (multi)graph stored as distinct pairs with multiplicities.

    ``pairs[k] = (a, b)`` with ``a < b`` carries ``multiplicity[k] >= 1``
    edges; ``loops[v]`` is the number of self-loops at ``v``.
    """

    n: int
    pairs: np.ndarray
    multiplicity: np.ndarray
    loops: np.ndarray
    kind: Kind = "multigraph"

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        mult = np.asarray(self.multiplicity, dtype=np.int64).ravel()
        loops = np.asarray(self.loops, dtype=np.int64).ravel()
        if mult.size != pairs.shape[0] or loops.size != self.n:
            raise InvalidInputError("inconsistent GraphSample arrays")
        if pairs.size and (
            pairs.min() < 0 or pairs.max() >= self.n or np.any(pairs[:, 0] >= pairs[:, 1])
        ):
            raise InvalidInputError("pairs must satisfy 0 <= a < b < n")
        if np.any(mult < 1) or np.any(loops < 0):
            raise InvalidInputError("multiplicities must be >= 1 and loop counts >= 0")
        if self.kind == "simple" and (np.any(mult > 1) or np.any(loops > 0)):
            raise InvalidInputError("simple graph with multi-edges or loops")
        if self.kind not in ("multigraph", "simple"):
            raise InvalidInputError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "multiplicity", mult)
        object.__setattr__(self, "loops", loops)

    @property
    def edge_count(self) -> int:
        """Total edges, counting multiplicities and loops."""
        return int(self.multiplicity.sum() + self.loops.sum())


@dataclass(frozen=True)
class ComponentSummary:
    size: int
    mass: float
    surplus: int


class UnionFind:
    """Disjoint sets over ``0 .. n-1`` with union by size and path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True

    def roots(self) -> list[int]:
        find = self.find
        return [find(i) for i in range(len(self.parent))]


@dataclass(frozen=True, eq=False)
class ComponentTable:
    """Components in canonical order, as parallel arrays.

    ``labels[v]`` is the position of vertex ``v``'s component in the
    arrays below.
    """

    labels: np.ndarray
    sizes: np.ndarray
    edges: np.ndarray

    @property
    def surpluses(self) -> np.ndarray:
        return self.edges - self.sizes + 1

    def masses(self, n: int) -> np.ndarray:
        return self.sizes * vertex_mass(n)


def _vertex_roots(n: int, pairs: np.ndarray) -> np.ndarray:
    uf = UnionFind(n)
    union = uf.union
    for a, b in pairs.tolist():
        union(a, b)
    return np.asarray(uf.roots(), dtype=np.int64)


def component_table(g: GraphSample) -> ComponentTable:
    roots = _vertex_roots(g.n, g.pairs)
    # first occurrence of each root is the component's smallest vertex
    uniq, first, raw = np.unique(roots, return_index=True, return_inverse=True)
    by_min_vertex = np.argsort(first, kind="stable")
    rank = np.empty_like(by_min_vertex)
    rank[by_min_vertex] = np.arange(uniq.size)
    comp = rank[raw]
    k = uniq.size
    sizes = np.bincount(comp, minlength=k)
    edges = np.bincount(comp[g.pairs[:, 0]], weights=g.multiplicity, minlength=k)
    edges = edges + np.bincount(comp, weights=g.loops, minlength=k)
    edges = np.rint(edges).astype(np.int64)
    surpluses = edges - sizes + 1
    order = np.lexsort((-surpluses, -sizes))
    relabel = np.empty_like(order)
    relabel[order] = np.arange(k)
    return ComponentTable(relabel[comp], sizes[order], edges[order])


def components(g: GraphSample) -> list[ComponentSummary]:
    """Connected components sorted by size, then surplus, both descending.

    Every edge copy and every loop counts towards the component's edge
    total, so ``surplus = edges - size + 1``. Exact ties keep the order of
    the components' smallest vertices.
    """
    table = component_table(g)
    masses = table.masses(g.n)
    return [
        ComponentSummary(int(s), float(m), int(sp))
        for s, m, sp in zip(table.sizes, masses, table.surpluses)
    ]


def psi_embedding(comps: list[ComponentSummary], params: ScalingParams) -> AugmentedPartition:
    sizes = np.array([c.size for c in comps], dtype=np.float64)
    surpluses = np.array([c.surplus for c in comps], dtype=np.int64)
    return canonicalize_arrays(sizes * params.vertex_mass, surpluses)


def _pair_rate(n: int, q: float) -> float:
    return q / np.cbrt(n) ** 4


def _check_q(n: int, q: float) -> None:
    if n < 1 or q < 0:
        raise InvalidInputError("need n >= 1 and q >= 0")


def multigraph_at(n: int, q: float, rng: np.random.Generator) -> GraphSample:
    """Superposition sampler at rescaled time ``q`` (``q = 0`` allowed).

    Draws the total pair-edge count and places each edge on a uniform
    unordered pair of distinct vertices; loops likewise on uniform vertices.
    """
    _check_q(n, q)
    rate = _pair_rate(n, q)
    k = int(rng.poisson(0.5 * n * (n - 1) * rate)) if n > 1 else 0
    u = rng.integers(0, n, size=k)
    v = rng.integers(0, max(n - 1, 1), size=k)
    v += v >= u
    a = np.minimum(u, v)
    b = np.maximum(u, v)
    keys, mult = np.unique(a * n + b, return_counts=True)
    pairs = np.stack((keys // n, keys % n), axis=1)
    n_loops = int(rng.poisson(0.5 * n * rate))
    loops = np.bincount(rng.integers(0, n, size=n_loops), minlength=n)
    return GraphSample(n, pairs, mult, loops, "multigraph")


def multigraph_naive(n: int, q: float, rng: np.random.Generator) -> GraphSample:
    """Reference sampler: one Poisson draw per pair and per vertex. O(n^2)."""
    _check_q(n, q)
    rate = _pair_rate(n, q)
    a, b = np.triu_indices(n, k=1)
    mult = rng.poisson(rate, size=a.size)
    loops = rng.poisson(0.5 * rate, size=n)
    hit = mult > 0
    return GraphSample(n, np.stack((a[hit], b[hit]), axis=1), mult[hit], loops, "multigraph")


def sample_multigraph(params: ScalingParams, rng: np.random.Generator) -> GraphSample:
    return multigraph_at(params.n, params.q, rng)


def project_simple(mg: GraphSample) -> GraphSample:
    """Keep one copy of every present pair and drop all loops."""
    if mg.kind != "multigraph":
        raise InvalidInputError("project_simple expects a multigraph sample")
    return GraphSample(
        mg.n,
        mg.pairs.copy(),
        np.ones(mg.pairs.shape[0], dtype=np.int64),
        np.zeros(mg.n, dtype=np.int64),
        "simple",
    )


@dataclass(frozen=True, eq=False)
class CoupledSample:
    """A multigraph and its simple projection, component by component.

    Arrays are aligned on the common vertex partition, in the multigraph's
    canonical order.
    """

    n: int
    sizes: np.ndarray
    surplus_multi: np.ndarray
    surplus_simple: np.ndarray

    @property
    def masses(self) -> np.ndarray:
        return self.sizes * vertex_mass(self.n)

    @property
    def gaps(self) -> np.ndarray:
        return self.surplus_multi - self.surplus_simple

    @property
    def gap_statistic(self) -> float:
        """Sum over components of mass times surplus gap."""
        return float(np.dot(self.masses, self.gaps))

    def multi_summaries(self) -> list[ComponentSummary]:
        return [
            ComponentSummary(int(s), float(m), int(k))
            for s, m, k in zip(self.sizes, self.masses, self.surplus_multi)
        ]

    def simple_summaries(self) -> list[ComponentSummary]:
        summaries = [
            ComponentSummary(int(s), float(m), int(k))
            for s, m, k in zip(self.sizes, self.masses, self.surplus_simple)
        ]
        # re-sort for the simple graph's own canonical order (stable)
        return sorted(summaries, key=lambda c: (-c.size, -c.surplus))


def coupled_at(n: int, q: float, rng: np.random.Generator) -> CoupledSample:
    mg = multigraph_at(n, q, rng)
    table = component_table(mg)
    simple_edges = np.bincount(table.labels[mg.pairs[:, 0]], minlength=table.sizes.size)
    return CoupledSample(n, table.sizes, table.surpluses, simple_edges - table.sizes + 1)


def sample_coupled_pair(params: ScalingParams, rng: np.random.Generator) -> CoupledSample:
    return coupled_at(params.n, params.q, rng)
