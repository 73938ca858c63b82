"""Colorings, flaw classification, state-space enumeration and flaw repair.

A coloring is a tuple of length ``n`` whose entry ``i - 1`` is the color of
vertex ``i``; colors run over ``1..k``. Batched routines take ``(B, n)``
integer arrays with the same convention.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .graph import Graph

__all__ = [
    "Coloring",
    "ColoringClass",
    "FlawRepairMap",
    "Kind",
    "StateSpace",
    "StateSpaceTooLargeError",
    "available_colors",
    "build_flaw_repair_map",
    "chi_recolor",
    "classify",
    "classify_batch",
    "enumerate_states",
    "format_coloring",
    "greedy_proper_coloring",
    "monochromatic_edges",
    "parse_coloring",
]

Coloring = tuple[int, ...]

DEFAULT_SCAN_BUDGET = 10**7
_CHUNK = 1 << 18


class StateSpaceTooLargeError(ValueError):
    pass


class Kind(enum.Enum):
    PROPER = "proper"
    SINGLY_FLAWED = "singly_flawed"
    INVALID = "invalid"


@dataclass(frozen=True)
class ColoringClass:
    kind: Kind
    flawed_vertices: frozenset[int] = frozenset()

    @property
    def in_state_space(self) -> bool:
        return self.kind is not Kind.INVALID


def _check(g: Graph, sigma: Sequence[int], k: int | None = None) -> None:
    if len(sigma) != g.n:
        raise ValueError(f"coloring has length {len(sigma)}, graph has {g.n} vertices")
    if k is not None and any(not 1 <= c <= k for c in sigma):
        raise ValueError(f"coloring {tuple(sigma)} has colors outside 1..{k}")


def monochromatic_edges(g: Graph, sigma: Sequence[int]) -> frozenset[tuple[int, int]]:
    _check(g, sigma)
    return frozenset((u, v) for u, v in g.edges if sigma[u - 1] == sigma[v - 1])


def classify(g: Graph, sigma: Sequence[int]) -> ColoringClass:
    mono = monochromatic_edges(g, sigma)
    if not mono:
        return ColoringClass(Kind.PROPER)
    common = frozenset.intersection(*(frozenset(e) for e in mono))
    if common:
        return ColoringClass(Kind.SINGLY_FLAWED, common)
    return ColoringClass(Kind.INVALID)


def classify_batch(g: Graph, colorings: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized classification of a ``(B, n)`` array.

    Returns boolean masks ``(proper, singly_flawed)``.
    """
    colorings = np.asarray(colorings)
    edges = g.edge_array
    if len(edges) == 0:
        ones = np.ones(colorings.shape[0], dtype=bool)
        return ones, ~ones
    mono = colorings[:, edges[:, 0]] == colorings[:, edges[:, 1]]
    total = mono.sum(axis=1)
    proper = total == 0
    # Monochromatic edges touching each vertex.
    touching = mono.astype(np.int64) @ _incidence(g)
    covered = (touching == total[:, None]).any(axis=1)
    return proper, ~proper & covered


def _incidence(g: Graph) -> np.ndarray:
    inc = np.zeros((g.m, g.n), dtype=np.int64)
    rows = np.arange(g.m)
    inc[rows, g.edge_array[:, 0]] = 1
    inc[rows, g.edge_array[:, 1]] = 1
    return inc


def available_colors(g: Graph, sigma: Sequence[int], v: int, k: int) -> frozenset[int]:
    """Colors that no neighbor of ``v`` currently uses."""
    _check(g, sigma)
    taken = {sigma[u - 1] for u in g.adjacency[v]}
    return frozenset(c for c in range(1, k + 1) if c not in taken)


def greedy_proper_coloring(g: Graph, k: int) -> Coloring:
    if k < g.max_degree + 1:
        raise ValueError(f"greedy coloring needs k >= max degree + 1 = {g.max_degree + 1}")
    sigma = [0] * g.n
    for v in g.vertices:
        taken = {sigma[u - 1] for u in g.adjacency[v]}
        sigma[v - 1] = next(c for c in range(1, k + 1) if c not in taken)
    return tuple(sigma)


def chi_recolor(C, k: int, c: int) -> int:
    """Balanced deterministic map from ``1..k`` onto the color set ``C``.

    Colors of ``C`` are ranked ascending and ``c`` is sent to rank
    ``(c - 1) mod |C|``, so pre-image counts differ by at most one.
    """
    ranked = sorted(C)
    if not ranked:
        raise ValueError("chi_recolor needs a nonempty color set")
    if not 1 <= c <= k:
        raise ValueError(f"color {c} outside 1..{k}")
    return ranked[(c - 1) % len(ranked)]


def _codes_to_colorings(codes: np.ndarray, n: int, k: int) -> np.ndarray:
    # Vertex 1 is the most significant digit, so code order is lexicographic.
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] // powers) % k + 1


def encode(colorings: np.ndarray, k: int) -> np.ndarray:
    colorings = np.atleast_2d(np.asarray(colorings, dtype=np.int64))
    n = colorings.shape[1]
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (colorings - 1) @ powers


@dataclass(frozen=True, eq=False)
class StateSpace:
    """All proper and singly-flawed k-colorings of a graph.

    Indices are dense: proper colorings come first in lexicographic order,
    followed by the singly-flawed ones, also lexicographic.
    """

    graph: Graph
    k: int
    proper: np.ndarray
    singly_flawed: np.ndarray

    @property
    def num_proper(self) -> int:
        return len(self.proper)

    @property
    def num_singly_flawed(self) -> int:
        return len(self.singly_flawed)

    @property
    def size(self) -> int:
        return self.num_proper + self.num_singly_flawed

    def __len__(self) -> int:
        return self.size

    @cached_property
    def states(self) -> np.ndarray:
        return np.concatenate([self.proper, self.singly_flawed]).astype(np.int64)

    @cached_property
    def codes(self) -> np.ndarray:
        return encode(self.states, self.k) if self.size else np.zeros(0, dtype=np.int64)

    @cached_property
    def _code_order(self) -> np.ndarray:
        return np.argsort(self.codes)

    @cached_property
    def index(self) -> dict[Coloring, int]:
        return {tuple(int(c) for c in row): i for i, row in enumerate(self.states)}

    def index_of(self, sigma: Sequence[int]) -> int:
        try:
            return self.index[tuple(sigma)]
        except KeyError:
            raise KeyError(f"{tuple(sigma)} is neither proper nor singly-flawed") from None

    def lookup(self, colorings: np.ndarray) -> np.ndarray:
        """Vectorized index lookup; ``-1`` for colorings outside the space."""
        codes = encode(colorings, self.k)
        order = self._code_order
        pos = np.searchsorted(self.codes, codes, sorter=order)
        pos = np.minimum(pos, len(order) - 1)
        found = order[pos]
        return np.where(self.codes[found] == codes, found, -1)

    def coloring(self, i: int) -> Coloring:
        return tuple(int(c) for c in self.states[i])

    def is_proper_index(self, i: int) -> bool:
        return i < self.num_proper

    def summary(self) -> dict:
        return {
            "n": self.graph.n,
            "k": self.k,
            "num_proper": self.num_proper,
            "num_singly_flawed": self.num_singly_flawed,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)


def enumerate_states(g: Graph, k: int, budget: int = DEFAULT_SCAN_BUDGET) -> StateSpace:
    """Scan all ``k**n`` colorings and keep the proper and singly-flawed ones."""
    if k < 1:
        raise ValueError("k must be positive")
    total = k**g.n
    if total > budget:
        raise StateSpaceTooLargeError(
            f"{k}^{g.n} = {total} colorings exceeds the scan budget of {budget}"
        )
    proper, flawed = [], []
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        batch = _codes_to_colorings(codes, g.n, k).astype(np.int8 if k < 128 else np.int64)
        p, sf = classify_batch(g, batch)
        proper.append(batch[p])
        flawed.append(batch[sf])
    return StateSpace(g, k, np.concatenate(proper), np.concatenate(flawed))


@dataclass(frozen=True, eq=False)
class FlawRepairMap:
    """Repair map from singly-flawed to proper colorings, by state index.

    ``image[i]`` is the proper index assigned to singly-flawed state ``i``
    (``image[i] == i`` for proper states). ``preimages[p]`` counts the
    singly-flawed states sent to proper state ``p``.
    """

    space: StateSpace
    image: np.ndarray
    repaired_vertex: dict[int, int]
    preimages: np.ndarray

    @property
    def max_preimages(self) -> int:
        return int(self.preimages.max(initial=0))

    def __call__(self, sigma: Sequence[int]) -> Coloring:
        return self.space.coloring(int(self.image[self.space.index_of(sigma)]))


def build_flaw_repair_map(g: Graph, space: StateSpace, k: int) -> FlawRepairMap:
    """Send each singly-flawed coloring to a proper neighbor.

    The smallest flawed vertex is recolored with its smallest available
    color; with ``k >= max degree + 2`` that color always exists and the
    result is proper.
    """
    if k < g.max_degree + 2:
        raise ValueError(f"flaw repair needs k >= max degree + 2 = {g.max_degree + 2}")
    image = np.arange(space.size, dtype=np.int64)
    repaired: dict[int, int] = {}
    for offset, row in enumerate(space.singly_flawed):
        i = space.num_proper + offset
        sigma = [int(c) for c in row]
        cls = classify(g, sigma)
        v = min(cls.flawed_vertices)
        options = available_colors(g, sigma, v, k)
        if not options:  # pragma: no cover - excluded by k >= max degree + 2
            raise AssertionError(f"no available color for flawed vertex {v} in {sigma}")
        sigma[v - 1] = min(options)
        target = space.index_of(sigma)
        if not space.is_proper_index(target):
            raise AssertionError(f"repair of {tuple(row)} is not proper")
        image[i] = target
        repaired[i] = v
    preimages = np.bincount(image[space.num_proper :], minlength=space.num_proper)
    return FlawRepairMap(space, image, repaired, preimages[: space.num_proper])


def format_coloring(sigma: Sequence[int]) -> str:
    return " ".join(str(int(c)) for c in sigma)


def parse_coloring(text: str, n: int | None = None, k: int | None = None) -> Coloring:
    sigma = tuple(int(tok) for tok in text.split())
    if n is not None and len(sigma) != n:
        raise ValueError(f"expected {n} colors, got {len(sigma)}")
    if k is not None and any(not 1 <= c <= k for c in sigma):
        raise ValueError(f"colors must lie in 1..{k}")
    return sigma

