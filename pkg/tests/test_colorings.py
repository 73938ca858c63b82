import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colorsampler.colorings import (
    Kind,
    StateSpaceTooLargeError,
    available_colors,
    build_flaw_repair_map,
    chi_recolor,
    classify,
    classify_batch,
    enumerate_states,
    greedy_proper_coloring,
    parse_coloring,
)
from colorsampler.graph import Graph

from conftest import brute_force_classes, corpus_instances


def chromatic_path(n, k):
    return k * (k - 1) ** (n - 1)


def chromatic_cycle(n, k):
    return (k - 1) ** n + (-1) ** n * (k - 1)


def chromatic_complete(n, k):
    out = 1
    for i in range(n):
        out *= k - i
    return out


class TestClassify:
    def test_proper(self, k3):
        assert classify(k3, (1, 2, 3)).kind is Kind.PROPER

    def test_single_edge_flags_both_ends(self, p3):
        cls = classify(p3, (1, 1, 2))
        assert cls.kind is Kind.SINGLY_FLAWED
        assert cls.flawed_vertices == {1, 2}

    def test_shared_center(self):
        star = Graph.star(3)
        cls = classify(star, (1, 1, 1, 2))
        assert cls.kind is Kind.SINGLY_FLAWED
        assert cls.flawed_vertices == {1}

    def test_monochromatic_triangle_is_invalid(self, k3):
        assert classify(k3, (1, 1, 1)).kind is Kind.INVALID

    def test_disjoint_edges_invalid(self):
        g = Graph(4, [(1, 2), (3, 4)])
        assert classify(g, (1, 1, 2, 2)).kind is Kind.INVALID

    @settings(max_examples=50, deadline=None)
    @given(st.integers(2, 6), st.integers(2, 4), st.integers(0, 50))
    def test_batch_agrees_with_scalar(self, n, k, seed):
        g = Graph.random(n, 0.6, seed=seed)
        rows = np.array(list(itertools.product(range(1, k + 1), repeat=n)))
        proper, flawed = classify_batch(g, rows)
        for row, p, f in zip(rows, proper, flawed):
            kind = classify(g, tuple(row)).kind
            assert p == (kind is Kind.PROPER)
            assert f == (kind is Kind.SINGLY_FLAWED)


class TestEnumeration:
    @pytest.mark.parametrize(
        "g, k, proper, flawed",
        [
            (Graph.complete(3), 4, 24, 36),
            (Graph.path(3), 4, 36, 28),
            (Graph.cycle(4), 4, 84, 144),
        ],
    )
    def test_known_counts(self, g, k, proper, flawed):
        space = enumerate_states(g, k)
        assert (space.num_proper, space.num_singly_flawed) == (proper, flawed)

    @pytest.mark.parametrize("n", range(1, 6))
    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    def test_chromatic_polynomials(self, n, k):
        assert enumerate_states(Graph.path(n), k).num_proper == chromatic_path(n, k)
        assert enumerate_states(Graph.complete(n), k).num_proper == chromatic_complete(n, k)
        if n >= 3:
            assert enumerate_states(Graph.cycle(n), k).num_proper == chromatic_cycle(n, k)

    @pytest.mark.parametrize("name, g, k", corpus_instances()[:12])
    def test_matches_brute_force(self, name, g, k):
        proper, flawed = brute_force_classes(g, k)
        space = enumerate_states(g, k)
        assert [tuple(r) for r in space.proper.tolist()] == proper
        assert [tuple(r) for r in space.singly_flawed.tolist()] == flawed

    def test_proper_first_indexing(self, p3):
        space = enumerate_states(p3, 4)
        for i in range(space.size):
            kind = classify(p3, space.coloring(i)).kind
            assert (kind is Kind.PROPER) == space.is_proper_index(i)
            assert space.index_of(space.coloring(i)) == i

    def test_lookup(self, k3):
        space = enumerate_states(k3, 4)
        idx = space.lookup(np.array([[1, 2, 3], [1, 1, 1], [2, 2, 1]]))
        assert idx[0] == space.index_of((1, 2, 3))
        assert idx[1] == -1
        assert idx[2] == space.index_of((2, 2, 1))

    def test_budget(self):
        with pytest.raises(StateSpaceTooLargeError):
            enumerate_states(Graph.path(12), 5)

    def test_summary(self, k3):
        assert enumerate_states(k3, 4).summary() == {
            "n": 3, "k": 4, "num_proper": 24, "num_singly_flawed": 36}


class TestRepairMap:
    def test_triangle_example(self, k3):
        space = enumerate_states(k3, 4)
        g_prime = build_flaw_repair_map(k3, space, 4)
        # Vertices 1 and 2 clash; vertex 1 takes the smallest color its neighbors leave free.
        assert g_prime((1, 1, 2)) == (3, 1, 2)

    def test_identity_on_proper(self, k3):
        space = enumerate_states(k3, 4)
        g_prime = build_flaw_repair_map(k3, space, 4)
        assert g_prime((1, 2, 3)) == (1, 2, 3)

    @pytest.mark.parametrize("name, g, k", corpus_instances())
    def test_images_are_adjacent_and_bounded(self, name, g, k):
        space = enumerate_states(g, k, budget=10**6)
        rep = build_flaw_repair_map(g, space, k)
        images = space.states[rep.image[space.num_proper:]]
        diff = (images != space.singly_flawed).sum(axis=1)
        assert np.all(diff == 1)
        assert np.all(rep.image[space.num_proper:] < space.num_proper)
        assert rep.max_preimages <= k * g.n
        assert int(rep.preimages.sum()) == space.num_singly_flawed

    def test_requires_spare_color(self, k3):
        with pytest.raises(ValueError):
            build_flaw_repair_map(k3, enumerate_states(k3, 3), 3)


class TestChi:
    def test_examples(self):
        assert chi_recolor({2, 5, 7}, 8, 1) == 2
        assert chi_recolor({2, 5, 7}, 8, 4) == 2
        assert chi_recolor({2, 5, 7}, 8, 8) == 5

    @pytest.mark.parametrize("k, C", [(13, {1, 4, 9, 12}), (8, {3, 6, 7}), (5, {5})])
    def test_balanced(self, k, C):
        counts = Counter(chi_recolor(C, k, c) for c in range(1, k + 1))
        assert set(counts) == set(C)
        assert max(counts.values()) - min(counts.values()) <= 1

    @given(st.integers(1, 20).flatmap(
        lambda k: st.tuples(st.just(k), st.sets(st.integers(1, k), min_size=1))))
    def test_balanced_property(self, args):
        k, C = args
        counts = Counter(chi_recolor(C, k, c) for c in range(1, k + 1))
        assert set(counts) <= C
        assert max(counts.values()) - min(counts.values()) <= 1
        assert len(counts) == min(len(C), k)

    def test_rejects(self):
        with pytest.raises(ValueError):
            chi_recolor(set(), 4, 1)
        with pytest.raises(ValueError):
            chi_recolor({1}, 4, 5)


class TestHelpers:
    def test_available(self, p3):
        assert available_colors(p3, (1, 2, 3), 2, 4) == {2, 4}

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 30), st.integers(0, 3))
    def test_greedy_is_proper(self, n, seed, extra):
        g = Graph.random(n, 0.5, seed=seed)
        sigma = greedy_proper_coloring(g, g.max_degree + 1 + extra)
        assert classify(g, sigma).kind is Kind.PROPER

    def test_parse(self):
        assert parse_coloring("1 2 3", n=3, k=3) == (1, 2, 3)
        with pytest.raises(ValueError):
            parse_coloring("1 2", n=3)
        with pytest.raises(ValueError):
            parse_coloring("1 5", k=4)
