"""Canonical-path multicommodity flow for the Single-Flaw chain and its audits.

Between two proper colorings the flow walks the phases of a
:class:`~colorsampler.graph.SeparatorSchedule`: phase ``j`` sets the vertex
of rank ``j`` to its target color, then re-fixes each separator vertex by
splitting the incoming mass evenly over that vertex's available colors.
Pairs with a singly-flawed endpoint detour through the flaw-repair map.

All masses are exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .chain import ChainConfig
from .colorings import (
    Coloring,
    FlawRepairMap,
    Kind,
    StateSpace,
    build_flaw_repair_map,
    classify,
)
from .graph import Graph, SeparatorSchedule

__all__ = [
    "CongestionReport",
    "FlowAssignment",
    "FlowInvariantError",
    "LayerMass",
    "PairFlow",
    "audit_claim10",
    "audit_flow_bounds",
    "audit_layers",
    "edge_congestion",
    "ergodic_flow",
    "route_all_flows",
    "route_pair_flow",
]

Edge = tuple[int, int]
# (phase, step, source index, target index)
StepEdge = tuple[int, int, int, int]


class FlowInvariantError(AssertionError):
    pass


@dataclass(frozen=True)
class LayerMass:
    """Mass on each state index at time ``(phase, step)``."""

    time: tuple[int, int]
    masses: dict[int, Fraction]

    @property
    def total(self) -> Fraction:
        return sum(self.masses.values(), Fraction(0))


@dataclass(frozen=True, eq=False)
class PairFlow:
    alpha: int
    beta: int
    mass: Fraction
    step_edges: dict[StepEdge, Fraction]
    layers: list[LayerMass]

    def edge_totals(self) -> dict[Edge, Fraction]:
        out: dict[Edge, Fraction] = defaultdict(Fraction)
        for (_, _, s, d), f in self.step_edges.items():
            out[(s, d)] += f
        return dict(out)


def _available(g: Graph, sigma: Coloring, v: int, k: int) -> list[int]:
    taken = {sigma[u - 1] for u in g.adjacency[v]}
    return [c for c in range(1, k + 1) if c not in taken]


def route_pair_flow(g: Graph, schedule: SeparatorSchedule, alpha: Coloring, beta: Coloring,
                    k: int, space: StateSpace, mass: Fraction | None = None,
                    keep_layers: bool = True) -> PairFlow:
    """Propagate the ``alpha -> beta`` flow layer by layer.

    ``mass`` defaults to ``pi(alpha) * pi(beta)`` under the uniform
    distribution on ``space``. Idle recolorings are kept as self-loop edges
    so every path has the same length.
    """
    alpha, beta = tuple(alpha), tuple(beta)
    for name, sigma in (("alpha", alpha), ("beta", beta)):
        if classify(g, sigma).kind is not Kind.PROPER:
            raise ValueError(f"{name} = {sigma} is not a proper coloring")
    if mass is None:
        mass = Fraction(1, space.size**2)
    index = space.index

    def idx(sigma: Coloring) -> int:
        try:
            return index[sigma]
        except KeyError:
            raise FlowInvariantError(f"routed state {sigma} is outside the state space") from None

    current: dict[Coloring, Fraction] = {alpha: mass}
    step_edges: dict[StepEdge, Fraction] = defaultdict(Fraction)
    layers: list[LayerMass] = []
    for j, step in schedule.times():
        if keep_layers:
            layers.append(LayerMass((j, step), {idx(s): m for s, m in current.items()}))
        u = schedule.step_vertex(j, step)
        nxt: dict[Coloring, Fraction] = defaultdict(Fraction)
        for sigma, m in current.items():
            src = idx(sigma)
            colors = [beta[u - 1]] if step == 1 else _available(g, sigma, u, k)
            if not colors:
                raise FlowInvariantError(f"vertex {u} has no available color in {sigma}")
            share = m / len(colors)
            for c in colors:
                tau = sigma[: u - 1] + (c,) + sigma[u:]
                step_edges[(j, step, src, idx(tau))] += share
                nxt[tau] += share
        current = nxt
    if keep_layers:
        final_time = (g.n, schedule.steps(g.n) + 1) if g.n else (0, 1)
        layers.append(LayerMass(final_time, {idx(s): m for s, m in current.items()}))
    if set(current) != {beta} or current[beta] != mass:
        raise FlowInvariantError(f"flow from {alpha} did not terminate at {beta}")
    return PairFlow(index[alpha], index[beta], mass, dict(step_edges), layers)


def audit_layers(g: Graph, schedule: SeparatorSchedule, space: StateSpace,
                 pair: PairFlow) -> list[str]:
    """Check one routed pair; returns human-readable problems (empty when clean).

    Checked: conservation of the layer totals, properness at the start of
    each phase, membership in the state space elsewhere, agreement with the
    target on the prefix and with the source beyond the separator once the
    phase vertex has been set, and that the splitting steps never have fewer
    than ``k - max degree`` options.
    """
    problems = []
    alpha, beta = space.coloring(pair.alpha), space.coloring(pair.beta)
    floor = space.k - g.max_degree
    for layer in pair.layers:
        j, step = layer.time
        if layer.total != pair.mass:
            problems.append(f"{layer.time}: mass {layer.total} != {pair.mass}")
        in_range = 1 <= j <= g.n and step <= schedule.steps(j)
        for i in layer.masses:
            sigma = space.coloring(i)
            kind = classify(g, sigma).kind
            if step == 1 and kind is not Kind.PROPER:
                problems.append(f"{layer.time}: state {sigma} is not proper")
            if kind is Kind.INVALID:
                problems.append(f"{layer.time}: state {sigma} is invalid")
            if step > 1 and in_range:
                sep = set(schedule.separator(j))
                for v in schedule.prefix(j):
                    if sigma[v - 1] != beta[v - 1]:
                        problems.append(f"{layer.time}: vertex {v} differs from target")
                for v in schedule.suffix(j) - sep:
                    if sigma[v - 1] != alpha[v - 1]:
                        problems.append(f"{layer.time}: vertex {v} differs from source")
                if step <= schedule.steps(j):
                    u = schedule.step_vertex(j, step)
                    if len(_available(g, sigma, u, space.k)) < floor:
                        problems.append(f"{layer.time}: fewer than {floor} colors for {u}")
    return problems


def _pairs(space: StateSpace) -> Iterator[tuple[int, int]]:
    for a in range(space.num_proper):
        for b in range(space.num_proper):
            yield a, b


@dataclass(eq=False)
class FlowAssignment:
    """Accumulated flow of every ordered pair of states.

    ``edge_flow`` and ``weighted_flow`` (flow times path length) cover all
    pairs; the ``proper_*`` ledgers and ``phase_flow`` cover proper pairs
    only. Keys of ``phase_flow`` are ``(phase, step, source, target)``.
    """

    space: StateSpace
    schedule: SeparatorSchedule
    repair: FlawRepairMap
    edge_flow: dict[Edge, Fraction] = field(default_factory=lambda: defaultdict(Fraction))
    weighted_flow: dict[Edge, Fraction] = field(default_factory=lambda: defaultdict(Fraction))
    proper_edge_flow: dict[Edge, Fraction] = field(default_factory=lambda: defaultdict(Fraction))
    proper_weighted_flow: dict[Edge, Fraction] = field(
        default_factory=lambda: defaultdict(Fraction))
    phase_flow: dict[StepEdge, Fraction] = field(default_factory=lambda: defaultdict(Fraction))
    pair_totals: dict[tuple[int, int], Fraction] = field(default_factory=dict)

    @property
    def path_length(self) -> int:
        return self.schedule.total_length

    def path_length_for(self, alpha: int, beta: int) -> int:
        extra = (not self.space.is_proper_index(alpha)) + (not self.space.is_proper_index(beta))
        return self.path_length + extra

    def total_flow(self) -> Fraction:
        return sum(self.pair_totals.values(), Fraction(0))


def route_all_flows(g: Graph, schedule: SeparatorSchedule, space: StateSpace, k: int,
                    repair: FlawRepairMap | None = None, on_pair=None) -> FlowAssignment:
    """Route the flow for every ordered pair of states.

    A singly-flawed source first moves all its mass to its repair image;
    a singly-flawed target receives it from its repair image. Each proper
    pair is routed once and then reused, scaled by the number of flawed
    states that repair onto its endpoints.
    """
    if repair is None:
        repair = build_flaw_repair_map(g, space, k)
    fa = FlowAssignment(space, schedule, repair)
    pi2 = Fraction(1, space.size**2)
    length = schedule.total_length
    n_sf = space.num_singly_flawed
    pre = [int(x) for x in repair.preimages]

    # Accumulate in units of pi^2 and rescale once at the end.
    phase_unit: dict[StepEdge, Fraction] = defaultdict(Fraction)
    proper_unit: dict[Edge, Fraction] = defaultdict(Fraction)
    edge_unit: dict[Edge, Fraction] = defaultdict(Fraction)
    weighted_unit: dict[Edge, Fraction] = defaultdict(Fraction)
    for a, b in _pairs(space):
        pair = route_pair_flow(g, schedule, space.coloring(a), space.coloring(b), k, space,
                               mass=Fraction(1), keep_layers=False)
        if on_pair is not None:
            on_pair(pair)
        ma, mb = 1 + pre[a], 1 + pre[b]
        weight = ma * mb * length + pre[a] * mb + ma * pre[b]
        for key, f in pair.step_edges.items():
            edge = key[2:]
            phase_unit[key] += f
            proper_unit[edge] += f
            edge_unit[edge] += f * (ma * mb)
            weighted_unit[edge] += f * weight
    for key, f in phase_unit.items():
        fa.phase_flow[key] = pi2 * f
    for edge, f in proper_unit.items():
        fa.proper_edge_flow[edge] = pi2 * f
        fa.proper_weighted_flow[edge] = pi2 * f * length
    for edge, f in edge_unit.items():
        fa.edge_flow[edge] = pi2 * f
    for edge, f in weighted_unit.items():
        fa.weighted_flow[edge] = pi2 * f

    # Repair detours: every flawed state sends mass pi^2 to each of the
    # |Omega| targets through (flawed, image), and receives the mirror flow.
    detour_flow = pi2 * space.size
    detour_weight = pi2 * (space.size * (length + 1) + n_sf)
    for offset in range(n_sf):
        i = space.num_proper + offset
        img = int(repair.image[i])
        for edge in ((i, img), (img, i)):
            fa.edge_flow[edge] += detour_flow
            fa.weighted_flow[edge] += detour_weight

    for a in range(space.size):
        for b in range(space.size):
            fa.pair_totals[(a, b)] = pi2
    return fa


def _move_count(space: StateSpace, sigma: Coloring) -> int:
    """Number of ``(v, c)`` proposals that change ``sigma`` and stay in the space."""
    count = 0
    for v in range(1, len(sigma) + 1):
        for c in range(1, space.k + 1):
            if c == sigma[v - 1]:
                continue
            tau = sigma[: v - 1] + (c,) + sigma[v:]
            if tau in space.index:
                count += 1
    return count


def ergodic_flow(space: StateSpace, cfg: ChainConfig, t: Edge) -> Fraction:
    """``pi(s) P(s, d)`` for a transition of the Single-Flaw chain."""
    s, d = t
    denom = 2 * cfg.k * cfg.n
    pi = Fraction(1, space.size)
    src, dst = space.coloring(s), space.coloring(d)
    if s == d:
        return pi * Fraction(denom - _move_count(space, src), denom)
    diff = [i for i in range(len(src)) if src[i] != dst[i]]
    if len(diff) != 1:
        raise ValueError(f"{src} -> {dst} is not a single-vertex recoloring")
    return pi * Fraction(1, denom)


def edge_congestion(fa: FlowAssignment, space: StateSpace, cfg: ChainConfig, t: Edge,
                    proper_only: bool = False) -> Fraction:
    ledger = fa.proper_weighted_flow if proper_only else fa.weighted_flow
    w = ledger.get(t, Fraction(0))
    if not w:
        return Fraction(0)
    return w / ergodic_flow(space, cfg, t)


@dataclass(frozen=True)
class Claim10Report:
    passed: bool
    checked: int
    worst_ratio: Fraction
    violations: list[tuple[int, int, int, int, Edge, Fraction, Fraction]]

    @property
    def slack(self) -> float:
        return float("inf") if not self.worst_ratio else float(1 / self.worst_ratio)


class _Claim10Check:
    def __init__(self, schedule: SeparatorSchedule, space: StateSpace, k: int,
                 max_violations: int):
        self.schedule = schedule
        self.space = space
        self.base = k - schedule.graph.max_degree
        self.max_violations = max_violations
        self.checked = 0
        self.worst = Fraction(0)
        self.violations: list = []

    def __call__(self, pair: PairFlow) -> None:
        # Pairs arrive with unit mass, so bounds are in units of pi(a)pi(b).
        for (j, step, s, d), f in pair.step_edges.items():
            self.checked += 1
            q = len(self.schedule.transition_quantum_set(j, step))
            ratio = f * self.base**q
            if ratio > self.worst:
                self.worst = ratio
            if ratio > 1 and len(self.violations) < self.max_violations:
                pi2 = Fraction(1, self.space.size**2)
                self.violations.append((pair.alpha, pair.beta, j, step, (s, d), f * pi2,
                                        pi2 / self.base**q))

    def report(self) -> Claim10Report:
        return Claim10Report(not self.violations and self.worst <= 1, self.checked,
                             self.worst, self.violations)


def audit_claim10(g: Graph, schedule: SeparatorSchedule, space: StateSpace, k: int,
                  max_violations: int = 20) -> Claim10Report:
    """Per pair, phase and transition: flow <= pi(a)pi(b) / (k - max degree)^|QS|.

    ``QS`` is :meth:`SeparatorSchedule.transition_quantum_set` for the step
    on which the transition is used.
    """
    check = _Claim10Check(schedule, space, k, max_violations)
    for a, b in _pairs(space):
        check(route_pair_flow(g, schedule, space.coloring(a), space.coloring(b), k, space,
                              mass=Fraction(1), keep_layers=False))
    return check.report()


@dataclass(frozen=True)
class CongestionReport:
    """Measured congestion against the three congestion bounds.

    Bound audits cover non-loop transitions; self-loop statistics are kept
    alongside for reference.
    """

    graph: Graph
    k: int
    order: tuple[int, ...]
    rho: dict[Edge, Fraction]
    rho_proper: dict[Edge, Fraction]
    rho_max: Fraction
    worst_edge: Edge | None
    rho_proper_max: Fraction
    loop_rho_max: Fraction
    lemma11_worst_ratio: Fraction
    lemma11_pass: bool
    rho_bound_lemma12: float
    lemma12_pass: bool
    rho_bound_main: float
    main_pass: bool
    claim10: Claim10Report | None = None

    @property
    def passed(self) -> bool:
        ok = self.lemma11_pass and self.lemma12_pass and self.main_pass
        return ok and (self.claim10 is None or self.claim10.passed)

    @property
    def main_slack(self) -> float:
        return self.rho_bound_main / float(self.rho_max) if self.rho_max else float("inf")

    @property
    def lemma12_slack(self) -> float:
        if not self.rho_proper_max:
            return float("inf")
        return self.rho_bound_lemma12 / float(self.rho_proper_max)

    def to_dict(self, space: StateSpace | None = None) -> dict:
        worst = None
        if self.worst_edge is not None:
            worst = list(self.worst_edge)
            if space is not None:
                worst = [list(space.coloring(i)) for i in self.worst_edge]
        out = {
            "k": self.k,
            "order": list(self.order),
            "rho_max": float(self.rho_max),
            "rho_max_exact": str(self.rho_max),
            "rho_proper_max": float(self.rho_proper_max),
            "rho_loop_max": float(self.loop_rho_max),
            "rho_bound_lemma12": self.rho_bound_lemma12,
            "rho_bound_main": self.rho_bound_main,
            "lemma11_pass": self.lemma11_pass,
            "lemma11_worst_ratio": float(self.lemma11_worst_ratio),
            "lemma12_pass": self.lemma12_pass,
            "lemma12_slack": self.lemma12_slack,
            "main_lemma_pass": self.main_pass,
            "main_slack": self.main_slack,
            "worst_edge": worst,
        }
        if self.claim10 is not None:
            out["claim10_pass"] = self.claim10.passed
            out["claim10_checked"] = self.claim10.checked
            out["claim10_slack"] = self.claim10.slack
        return out

    def to_json(self, space: StateSpace | None = None) -> str:
        return json.dumps(self.to_dict(space), sort_keys=True)


def congestion_bounds(schedule: SeparatorSchedule, k: int) -> tuple[float, float]:
    """(proper-pair bound, overall bound) on the congestion of one transition."""
    g = schedule.graph
    n = g.n
    ratio = k / (k - g.max_degree)
    core = schedule.length_scale * ratio ** (2 * schedule.vsn)
    return 2 * k * n**3 * core, 8 * k**3 * n**5 * core


def audit_flow_bounds(g: Graph, schedule: SeparatorSchedule, space: StateSpace, k: int,
                      fa: FlowAssignment | None = None,
                      with_claim10: bool = True) -> CongestionReport:
    """Route (if needed) and audit per-phase flows and edge congestion."""
    claim10 = None
    if fa is None:
        check = _Claim10Check(schedule, space, k, 20) if with_claim10 else None
        fa = route_all_flows(g, schedule, space, k, on_pair=check)
        if check is not None:
            claim10 = check.report()
    elif with_claim10:
        claim10 = audit_claim10(g, schedule, space, k)
    cfg = ChainConfig(k=k, n=g.n)
    pi2 = Fraction(1, space.size**2)
    ratio = Fraction(k, k - g.max_degree)

    lemma11_worst = Fraction(0)
    per_phase: dict[tuple[int, Edge], Fraction] = defaultdict(Fraction)
    for (j, step, s, d), f in fa.phase_flow.items():
        if s != d:
            per_phase[(j, (s, d))] += f
    for (j, _), f in per_phase.items():
        bound = pi2 * space.num_proper * ratio ** (2 * len(schedule.separator(j)))
        lemma11_worst = max(lemma11_worst, f / bound)

    rho, rho_proper = {}, {}
    loop_max = Fraction(0)
    for t in fa.weighted_flow:
        value = edge_congestion(fa, space, cfg, t)
        if t[0] == t[1]:
            loop_max = max(loop_max, value)
        else:
            rho[t] = value
    for t in fa.proper_weighted_flow:
        if t[0] != t[1]:
            rho_proper[t] = edge_congestion(fa, space, cfg, t, proper_only=True)

    worst_edge = max(sorted(rho), key=lambda e: rho[e]) if rho else None
    rho_max = rho[worst_edge] if worst_edge is not None else Fraction(0)
    rho_proper_max = max(rho_proper.values(), default=Fraction(0))
    b12, bmain = congestion_bounds(schedule, k)
    return CongestionReport(
        graph=g,
        k=k,
        order=schedule.order.vertices,
        rho=rho,
        rho_proper=rho_proper,
        rho_max=rho_max,
        worst_edge=worst_edge,
        rho_proper_max=rho_proper_max,
        loop_rho_max=loop_max,
        lemma11_worst_ratio=lemma11_worst,
        lemma11_pass=lemma11_worst <= 1,
        rho_bound_lemma12=b12,
        lemma12_pass=all(v <= b12 for v in rho_proper.values()),
        rho_bound_main=bmain,
        main_pass=all(v <= bmain for v in rho.values()),
        claim10=claim10,
    )
