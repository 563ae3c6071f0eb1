"""Smallest Dirichlet eigenpair against closed forms and dense solves."""

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_connected_graph, random_connected_interior
from graphlv import boundary_of, build_graph, dirichlet_blocks, smallest_dirichlet_eigenpair
from graphlv.errors import EmptyBoundary
from graphlv.graphs import DomainPartition


def dense_smallest(graph, species, partition):
    """Oracle: eigvalsh of the measure-symmetrized interior operator."""
    l_ii, _ = dirichlet_blocks(graph, species, partition)
    mu = graph.measure(species)[partition.interior_idx]
    root = np.sqrt(mu)
    sym = root[:, None] * (-l_ii) / root[None, :]
    return float(scipy.linalg.eigvalsh(sym)[0])


class TestFrozenValues:
    def test_reflecting_example_closed_form(self, reflecting):
        graph, part = reflecting
        pair = smallest_dirichlet_eigenpair(graph, 1, part)
        lam = (5.0 - np.sqrt(13.0)) / 6.0
        assert pair.lambda0 == pytest.approx(lam, abs=1e-12)
        # symmetric under swapping x1 and x3, peak at x2
        assert np.allclose(pair.phi, [1.0 - lam, 1.0, 1.0 - lam], atol=1e-10)
        assert pair.residual <= 1e-10

    def test_single_interior_vertex(self):
        g = build_graph(
            ["a", "b", "c"],
            [("a", "b", 2.0), ("b", "c", 3.0)],
            measure1={"a": 1.0, "b": 2.0, "c": 1.0},
        )
        part = boundary_of(g, ["b"])
        pair = smallest_dirichlet_eigenpair(g, 1, part)
        # closure degree over the measure, eigenvector trivially (1,)
        assert pair.lambda0 == pytest.approx(5.0 / 2.0, abs=1e-13)
        assert pair.phi.shape == (1,)
        assert pair.phi[0] == 1.0


class TestAgainstDense:
    def test_random_graphs(self):
        rng = np.random.default_rng(21)
        worst = 0.0
        for _ in range(30):
            g = random_connected_graph(rng, split_weights=True, random_measure=True)
            part = random_connected_interior(rng, g)
            for species in (1, 2):
                pair = smallest_dirichlet_eigenpair(g, species, part, tol=1e-12)
                want = dense_smallest(g, species, part)
                worst = max(worst, abs(pair.lambda0 - want))
        assert worst <= 1e-10

    def test_eigenvector_properties(self):
        rng = np.random.default_rng(22)
        for _ in range(10):
            g = random_connected_graph(rng)
            part = random_connected_interior(rng, g)
            pair = smallest_dirichlet_eigenpair(g, 1, part)
            assert np.all(pair.phi > 0.0)
            assert pair.phi.max() == pytest.approx(1.0, abs=1e-14)
            l_ii, _ = dirichlet_blocks(g, 1, part)
            res = -(l_ii @ pair.phi) - pair.lambda0 * pair.phi
            assert np.linalg.norm(res) <= 1e-9


class TestProperties:
    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_rayleigh_upper_bound(self, seed):
        # lambda0 minimises the mu-weighted Rayleigh quotient
        rng = np.random.default_rng(seed)
        g = random_connected_graph(rng, random_measure=True)
        part = random_connected_interior(rng, g)
        pair = smallest_dirichlet_eigenpair(g, 1, part)
        l_ii, _ = dirichlet_blocks(g, 1, part)
        mu = g.measure(1)[part.interior_idx]
        v = rng.uniform(0.1, 2.0, size=len(part.interior))
        quotient = float((mu * v) @ (-(l_ii @ v))) / float((mu * v) @ v)
        assert pair.lambda0 <= quotient + 1e-10

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_positive(self, seed):
        rng = np.random.default_rng(seed)
        g = random_connected_graph(rng)
        part = random_connected_interior(rng, g)
        assert smallest_dirichlet_eigenpair(g, 1, part).lambda0 > 0.0

    def test_species_use_their_own_weights(self):
        g = build_graph(
            ["a", "b", "c", "d"],
            [("a", "b", 1.0), ("b", "c", 1.0), ("c", "d", 1.0)],
            [("a", "b", 5.0), ("b", "c", 0.2), ("c", "d", 1.0)],
            measure1={"a": 1.0, "b": 1.0, "c": 1.0, "d": 1.0},
            measure2={"a": 1.0, "b": 1.0, "c": 1.0, "d": 1.0},
        )
        part = boundary_of(g, ["b", "c"])
        p1 = smallest_dirichlet_eigenpair(g, 1, part)
        p2 = smallest_dirichlet_eigenpair(g, 2, part)
        assert abs(p1.lambda0 - p2.lambda0) > 1e-3


def test_empty_boundary_rejected(triangle):
    part = DomainPartition(
        interior=("x1", "x2", "x3"),
        boundary=(),
        interior_idx=np.arange(3),
        boundary_idx=np.empty(0, dtype=int),
    )
    with pytest.raises(EmptyBoundary):
        smallest_dirichlet_eigenpair(triangle, 1, part)
