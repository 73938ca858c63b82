"""Exact mixing times of Single-Flaw and Glauber dynamics against the congestion bound.

Run: python3 notebooks/02_mixing_times.py
"""

import math

from colorsampler import (
    ChainConfig,
    ChainKind,
    Graph,
    build_transition_matrix,
    enumerate_states,
    exact_mixing_time,
    find_minimal_order,
    theoretical_tau_bound,
)

delta = 1 / (2 * math.e)
cases = [("P3", Graph.path(3), 4), ("K3", Graph.complete(3), 4),
         ("S3", Graph.star(3), 5), ("C4", Graph.cycle(4), 4)]

print(f"{'graph':6}{'k':>3}{'|Omega|':>9}{'single-flaw':>13}{'glauber':>9}{'bound':>12}")
for name, g, k in cases:
    space = enumerate_states(g, k)
    t_sf = exact_mixing_time(build_transition_matrix(g, ChainConfig.for_graph(g, k), space), delta)
    glauber = ChainConfig.for_graph(g, k, ChainKind.GLAUBER)
    t_gl = exact_mixing_time(build_transition_matrix(g, glauber, space), delta)
    _, pw = find_minimal_order(g)
    bound = theoretical_tau_bound(g.n, g.max_degree, k, pw, pw / math.log2(g.n), delta)
    print(f"{name:6}{k:>3}{space.size:>9}{t_sf:>13}{t_gl:>9}{bound:>12.3g}")

# The bound is loose by design; the exact values show how fast these tiny chains really mix.
