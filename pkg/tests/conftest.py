"""Shared fixtures: small example graphs and naive reference operators.

The reference implementations here are deliberately written as double
loops over vertex names, straight from the defining sums, so they share
no code path with the vectorized operators they check.
"""

from __future__ import annotations

import numpy as np
import pytest

from graphlv import boundary_of, build_graph
from graphlv.fixtures import reflecting_example, triangle_example


@pytest.fixture
def reflecting():
    return reflecting_example()


@pytest.fixture
def triangle():
    return triangle_example()


# ---------------------------------------------------------------------------
# naive reference operators (defining sums, no vectorization)
# ---------------------------------------------------------------------------

def naive_whole_laplacian(graph, species, field):
    w = graph.weights(species)
    mu = graph.measure(species)
    out = np.zeros(graph.n)
    for x in range(graph.n):
        acc = 0.0
        for y in range(graph.n):
            acc += (field[y] - field[x]) * w[y, x]
        out[x] = acc / mu[x]
    return out


def naive_subgraph_laplacian(graph, species, partition, field):
    """Interior values of the subgraph operator; sums range over the closure."""
    w = graph.weights(species)
    mu = graph.measure(species)
    closure = list(partition.interior_idx) + list(partition.boundary_idx)
    out = np.zeros(len(partition.interior_idx))
    for k, x in enumerate(partition.interior_idx):
        acc = 0.0
        for y in closure:
            acc += (field[y] - field[x]) * w[y, x]
        out[k] = acc / mu[x]
    return out


def naive_normal_derivative(graph, species, partition, field, x):
    w = graph.weights(species)
    mu = graph.measure(species)
    acc = 0.0
    for y in partition.interior_idx:
        acc += (field[x] - field[y]) * w[x, y]
    return acc / mu[x]


# ---------------------------------------------------------------------------
# random problem generators (seeded, deterministic)
# ---------------------------------------------------------------------------

def random_connected_graph(rng, max_vertices=8, split_weights=False,
                           random_measure=False):
    """Random spanning tree plus extra edges; optionally two weight tables."""
    n = int(rng.integers(2, max_vertices + 1))
    names = tuple(f"v{i}" for i in range(n))
    edges = set()
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.add((j, i))
    extra = int(rng.integers(0, n))
    for _ in range(extra):
        i, j = sorted(rng.integers(0, n, size=2).tolist())
        if i != j:
            edges.add((i, j))

    def table():
        return [(names[i], names[j], float(rng.uniform(0.2, 3.0))) for i, j in sorted(edges)]

    weights1 = table()
    weights2 = table() if split_weights else None
    measure1 = measure2 = None
    if random_measure:
        measure1 = {v: float(rng.uniform(0.5, 2.0)) for v in names}
        measure2 = {v: float(rng.uniform(0.5, 2.0)) for v in names}
    return build_graph(names, weights1, weights2, measure1=measure1, measure2=measure2)


def random_connected_interior(rng, graph, max_interior=None):
    """A partition whose interior induces a connected subgraph.

    Grows the interior from a random seed vertex along existing edges,
    so the induced subgraph is connected by construction.
    """
    adj = graph.adjacency
    cap = graph.n - 1 if max_interior is None else min(max_interior, graph.n - 1)
    size = int(rng.integers(1, cap + 1))
    start = int(rng.integers(0, graph.n))
    chosen = [start]
    frontier = set(np.flatnonzero(adj[start]).tolist()) - set(chosen)
    while len(chosen) < size and frontier:
        nxt = int(rng.choice(sorted(frontier)))
        chosen.append(nxt)
        frontier |= set(np.flatnonzero(adj[nxt]).tolist())
        frontier -= set(chosen)
    # a connected graph with a strict subset interior always has a boundary
    interior = [graph.vertices[i] for i in chosen]
    return boundary_of(graph, interior)
