"""Route the canonical-path flow on small graphs and compare congestion with its bounds.

Run: python3 notebooks/03_flow_audit.py
"""

from colorsampler import Graph, audit_flow_bounds, build_separator_schedule, enumerate_states
from colorsampler.graph import find_minimal_order

for name, g, k in [("P3", Graph.path(3), 4), ("K3", Graph.complete(3), 4),
                   ("P4", Graph.path(4), 4)]:
    order, vsn = find_minimal_order(g)
    sched = build_separator_schedule(g, order)
    space = enumerate_states(g, k)
    rep = audit_flow_bounds(g, sched, space, k)
    print(f"{name} k={k} order={order.vertices} vsn={vsn} path length={sched.total_length}")
    print(f"  max congestion {float(rep.rho_max):9.1f}  bound {rep.rho_bound_main:10.4g}  "
          f"(x{rep.main_slack:.0f} room)")
    print(f"  proper pairs   {float(rep.rho_proper_max):9.1f}  bound {rep.rho_bound_lemma12:10.4g}")
    print(f"  per-phase flow ratio {float(rep.lemma11_worst_ratio):.2f}, "
          f"per-transition ratio {float(rep.claim10.worst_ratio):.2f} over "
          f"{rep.claim10.checked} checks")
    u, v = rep.worst_edge
    print(f"  busiest transition {space.coloring(u)} -> {space.coloring(v)}")
