import itertools

import pytest

from colorsampler import Graph


def corpus_graphs():
    """Paths, cycles, stars, complete graphs up to n=5 and seeded random graphs."""
    graphs = [(f"P{n}", Graph.path(n)) for n in range(2, 6)]
    graphs += [(f"C{n}", Graph.cycle(n)) for n in range(3, 6)]
    graphs += [(f"S{leaves}", Graph.star(leaves)) for leaves in range(2, 5)]
    graphs += [(f"K{n}", Graph.complete(n)) for n in range(2, 6)]
    graphs += [(f"R{n}s{s}", Graph.random(n, 0.5, seed=s)) for n in (4, 5, 6) for s in (1, 2)]
    return graphs


def corpus_instances():
    """(name, graph, k) for k in {max degree + 2, 2 * max degree} with k >= max degree + 2."""
    out = []
    for name, g in corpus_graphs():
        d = g.max_degree
        for k in sorted({d + 2, 2 * d}):
            if k >= d + 2:
                out.append((f"{name}-k{k}", g, k))
    return out


def brute_force_classes(g, k):
    """Pure-python split of all k^n colorings into proper / singly-flawed lists."""
    proper, flawed = [], []
    for sigma in itertools.product(range(1, k + 1), repeat=g.n):
        mono = [e for e in g.edges if sigma[e[0] - 1] == sigma[e[1] - 1]]
        if not mono:
            proper.append(sigma)
        elif any(all(v in e for e in mono) for v in g.vertices):
            flawed.append(sigma)
    return proper, flawed


@pytest.fixture
def k3():
    return Graph.complete(3)


@pytest.fixture
def p3():
    return Graph.path(3)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def record():
    """Log one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def _record(number, ok, detail):
        _ACCEPTANCE.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        print(_ACCEPTANCE[-1])
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
