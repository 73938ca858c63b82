"""Single-Flaw dynamics for sampling proper graph colorings, with exact desk-scale audits."""

from .chain import (
    ChainConfig,
    ChainKind,
    TransitionMatrix,
    build_transition_matrix,
    exact_mixing_time,
    glauber_step,
    simulate,
    single_flaw_step,
    theoretical_tau_bound,
    tv_distance,
)
from .colorings import (
    ColoringClass,
    Kind,
    StateSpace,
    available_colors,
    build_flaw_repair_map,
    chi_recolor,
    classify,
    enumerate_states,
    greedy_proper_coloring,
    monochromatic_edges,
)
from .flow import (
    CongestionReport,
    FlowAssignment,
    audit_claim10,
    audit_flow_bounds,
    edge_congestion,
    ergodic_flow,
    route_all_flows,
    route_pair_flow,
)
from .graph import (
    Graph,
    LinearOrder,
    SeparatorSchedule,
    build_separator_schedule,
    find_minimal_order,
    load_graph,
    load_order,
    minimal_vertex_separator,
    read_graph,
    vertex_separation_number,
)
from .sampler import (
    SampleResult,
    SamplerParams,
    resolve_steps,
    sample_batch,
    sample_proper_coloring,
    uniformity_test,
)

__version__ = "0.1.0"
