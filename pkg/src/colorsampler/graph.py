"""Graphs, linear orders, vertex separators and exact vertex separation number.

Vertices are labelled ``1..n`` throughout. A linear order is stored as the
sequence of vertices in rank order, so ``order.vertices[0]`` has rank 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

__all__ = [
    "Graph",
    "GraphParseError",
    "GraphTooLargeError",
    "LinearOrder",
    "SeparatorSchedule",
    "build_separator_schedule",
    "find_minimal_order",
    "load_graph",
    "load_order",
    "minimal_vertex_separator",
    "read_graph",
    "vertex_separation_number",
]

DEFAULT_EXACT_ORDER_CAP = 20


class GraphParseError(ValueError):
    """Malformed edge-list document. ``lineno`` is 1-based (0 if unknown)."""

    def __init__(self, message: str, lineno: int = 0):
        self.lineno = lineno
        if lineno:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class GraphTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``1..n``.

    ``edges`` holds pairs ``(u, v)`` with ``u < v``.
    """

    n: int
    edges: frozenset[tuple[int, int]]
    adjacency: tuple[frozenset[int], ...] = field(repr=False, compare=False)

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        normalized = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"edge ({u}, {v}) out of range 1..{n}")
            normalized.add((min(u, v), max(u, v)))
        adj: list[set[int]] = [set() for _ in range(n + 1)]
        for u, v in normalized:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(normalized))
        object.__setattr__(self, "adjacency", tuple(frozenset(a) for a in adj))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency[1:]), default=0)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """``(m, 2)`` array of 0-based endpoints, rows sorted."""
        if not self.edges:
            return np.zeros((0, 2), dtype=np.intp)
        return np.array(sorted(self.edges), dtype=np.intp) - 1

    # Convenience constructors for the standard families used in audits.
    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls(n, [(i, i + 1) for i in range(1, n)])

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        if n < 3:
            raise ValueError("a cycle needs at least 3 vertices")
        return cls(n, [(i, i % n + 1) for i in range(1, n + 1)])

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)])

    @classmethod
    def star(cls, leaves: int) -> "Graph":
        """Star with center 1 and leaves ``2..leaves+1``."""
        return cls(leaves + 1, [(1, v) for v in range(2, leaves + 2)])

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, [])

    @classmethod
    def random(cls, n: int, p: float, seed: int = 0) -> "Graph":
        """Erdos-Renyi G(n, p) drawn with a seeded numpy generator."""
        rng = np.random.default_rng(seed)
        pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
        keep = rng.random(len(pairs)) < p
        return cls(n, [e for e, k in zip(pairs, keep) if k])

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in sorted(self.edges))
        return "\n".join(lines) + "\n"


def load_graph(text: str) -> Graph:
    """Parse an edge-list document.

    The first non-comment line is ``n m``, followed by ``m`` lines ``u v``.
    Lines starting with ``#`` and blank lines are skipped; duplicate edges
    are merged.
    """
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphParseError(f"expected two integers, got {raw.strip()!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"non-integer token in {raw.strip()!r}", lineno) from None
        if header is None:
            if a < 0 or b < 0:
                raise GraphParseError("n and m must be nonnegative", lineno)
            header = (a, b)
            continue
        n = header[0]
        if len(edges) >= header[1]:
            raise GraphParseError(f"more than the declared {header[1]} edges", lineno)
        if not (1 <= a <= n and 1 <= b <= n):
            raise GraphParseError(f"vertex out of range 1..{n}", lineno)
        if a == b:
            raise GraphParseError(f"self-loop at vertex {a}", lineno)
        edges.append((a, b))
    if header is None:
        raise GraphParseError("missing 'n m' header line")
    if len(edges) != header[1]:
        raise GraphParseError(f"declared {header[1]} edges but found {len(edges)}")
    return Graph(header[0], edges)


def read_graph(path) -> Graph:
    with open(path) as fh:
        return load_graph(fh.read())


@dataclass(frozen=True)
class LinearOrder:
    """Bijection from vertices to ranks ``1..n``, stored as vertices in rank order."""

    vertices: tuple[int, ...]

    def __post_init__(self):
        n = len(self.vertices)
        if sorted(self.vertices) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.vertices}")
        object.__setattr__(self, "vertices", tuple(int(v) for v in self.vertices))

    @classmethod
    def identity(cls, n: int) -> "LinearOrder":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @cached_property
    def ranks(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.vertices, start=1)}

    def rank(self, v: int) -> int:
        return self.ranks[v]

    def vertex(self, rank: int) -> int:
        return self.vertices[rank - 1]


def load_order(text: str, n: int | None = None) -> LinearOrder:
    """Parse a whitespace-separated permutation of ``1..n``."""
    try:
        order = LinearOrder(tuple(int(tok) for tok in text.split()))
    except ValueError as exc:
        raise ValueError(f"invalid order: {exc}") from None
    if n is not None and order.n != n:
        raise ValueError(f"order has {order.n} vertices, graph has {n}")
    return order


def minimal_vertex_separator(g: Graph, order: LinearOrder, j: int) -> frozenset[int]:
    """Vertices ranked after ``j`` that have a neighbor ranked at most ``j``."""
    if not 1 <= j <= g.n:
        raise ValueError(f"index {j} outside 1..{g.n}")
    rank = order.ranks
    return frozenset(
        u for u in g.vertices if rank[u] > j and any(rank[v] <= j for v in g.adjacency[u])
    )


def vertex_separation_number(g: Graph, order: LinearOrder) -> int:
    return max((len(minimal_vertex_separator(g, order, j)) for j in g.vertices), default=0)


def _boundary_sizes(g: Graph) -> np.ndarray:
    """``b[S]`` = number of vertices outside ``S`` with a neighbor inside ``S``."""
    n = g.n
    nbr = np.zeros(n, dtype=np.int64)
    for u, v in g.edges:
        nbr[u - 1] |= 1 << (v - 1)
        nbr[v - 1] |= 1 << (u - 1)
    closed = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        lo = 1 << i
        closed[lo : 2 * lo] = closed[:lo] | nbr[i]
    masks = np.arange(1 << n, dtype=np.int64)
    return np.bitwise_count(closed & ~masks).astype(np.int64)


def find_minimal_order(g: Graph, cap: int = DEFAULT_EXACT_ORDER_CAP) -> tuple[LinearOrder, int]:
    """Exact minimum vertex separation order by dynamic programming over subsets.

    ``best[S]`` is the smallest achievable maximum separator while the placed
    prefix grows to ``S``. Ties are broken toward placing the smallest label
    first, so the result is deterministic.
    """
    n = g.n
    if n > cap:
        raise GraphTooLargeError(
            f"exact order search is limited to {cap} vertices (graph has {n}); "
            "supply a linear order explicitly"
        )
    if n == 0:
        return LinearOrder(()), 0
    bsize = _boundary_sizes(g)
    full = (1 << n) - 1
    masks = np.arange(1 << n, dtype=np.int64)
    popcount = np.bitwise_count(masks)
    best = np.full(1 << n, np.iinfo(np.int64).max, dtype=np.int64)
    best[0] = 0
    for size in range(1, n + 1):
        layer = masks[popcount == size]
        cand = np.full(layer.shape, np.iinfo(np.int64).max, dtype=np.int64)
        for v in range(n):
            bit = 1 << v
            has = (layer & bit) != 0
            np.minimum.at(cand, np.nonzero(has)[0], best[layer[has] ^ bit])
        best[layer] = np.maximum(cand, bsize[layer])

    # Walk back from the full set, peeling off a last vertex whose removal
    # keeps the optimum; the largest such label goes last.
    placed = full
    reversed_order = []
    while placed:
        for v in range(n - 1, -1, -1):
            bit = 1 << v
            if placed & bit and best[placed ^ bit] <= best[placed]:
                break
        reversed_order.append(v + 1)
        placed ^= 1 << v
    order = LinearOrder(tuple(reversed(reversed_order)))
    return order, int(best[full])


@dataclass(frozen=True, eq=False)
class SeparatorSchedule:
    """Phase/step layout of the canonical paths for one linear order.

    Phase ``j`` first recolors the vertex of rank ``j`` (step 1), then
    re-fixes each vertex of ``separators[j-1]`` in increasing label order
    (steps ``2..|S_j|+1``). Time ``(j, l)`` is the start of step ``l`` of
    phase ``j``; time ``(j, |S_j|+2)`` coincides with ``(j+1, 1)``.
    """

    graph: Graph
    order: LinearOrder
    separators: tuple[tuple[int, ...], ...]
    quantum: dict[tuple[int, int], frozenset[int]] = field(repr=False)

    @property
    def n(self) -> int:
        return self.graph.n

    def separator(self, j: int) -> tuple[int, ...]:
        return self.separators[j - 1]

    def prefix(self, j: int) -> frozenset[int]:
        return frozenset(self.order.vertices[:j])

    def suffix(self, j: int) -> frozenset[int]:
        return frozenset(self.order.vertices[j:])

    def steps(self, j: int) -> int:
        return len(self.separators[j - 1]) + 1

    def step_vertex(self, j: int, step: int) -> int:
        if step == 1:
            return self.order.vertex(j)
        return self.separators[j - 1][step - 2]

    @cached_property
    def vsn(self) -> int:
        return max((len(s) for s in self.separators), default=0)

    @cached_property
    def total_length(self) -> int:
        return self.n + sum(len(s) for s in self.separators)

    @cached_property
    def log_n(self) -> float:
        return math.log2(self.n) if self.n > 1 else 0.0

    @cached_property
    def lam(self) -> float:
        """vsn / log2(n); defined as 0 for a single vertex."""
        return self.vsn / self.log_n if self.n > 1 else 0.0

    @property
    def length_scale(self) -> float:
        """``(lam + 1) * log2(n)``, computed as ``vsn + log2(n)`` to stay finite at n=1."""
        return self.vsn + self.log_n

    def quantum_set(self, j: int, step: int) -> frozenset[int]:
        """Vertices whose color is not fixed by the endpoints at time ``(j, step)``."""
        return self.quantum[(j, step)]

    def transition_quantum_set(self, j: int, step: int) -> frozenset[int]:
        """Undetermined vertices that pin down the flow on a step-``(j, step)`` transition.

        For step 1 the flow on the edge equals the flow into its source, so
        the set at the start of the step applies. A splitting step divides
        the incoming flow again, so the recolored vertex is included.
        """
        if step == 1:
            return self.quantum[(j, 1)]
        return self.quantum[(j, step + 1)]

    def times(self) -> Iterable[tuple[int, int]]:
        for j in range(1, self.n + 1):
            for step in range(1, self.steps(j) + 1):
                yield j, step


def build_separator_schedule(g: Graph, order: LinearOrder) -> SeparatorSchedule:
    if order.n != g.n:
        raise ValueError(f"order has {order.n} vertices, graph has {g.n}")
    separators = tuple(
        tuple(sorted(minimal_vertex_separator(g, order, j))) for j in g.vertices
    )
    quantum: dict[tuple[int, int], frozenset[int]] = {}
    current: frozenset[int] = frozenset()
    for j in g.vertices:
        quantum[(j, 1)] = current
        current = current - {order.vertex(j)}
        for step, u in enumerate(separators[j - 1], start=2):
            quantum[(j, step)] = current
            current = current | {u}
        quantum[(j, len(separators[j - 1]) + 2)] = current
    return SeparatorSchedule(g, order, separators, quantum)

