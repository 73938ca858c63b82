"""Command-line entry point. Every run prints one JSON document on stdout.

Exit status: 0 on success, 1 when an audit or statistical test fails,
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .chain import (
    ChainConfig,
    ChainKind,
    ConvergenceError,
    build_transition_matrix,
    exact_mixing_time,
    simulate,
    theoretical_tau_bound,
)
from .colorings import (
    Kind,
    StateSpaceTooLargeError,
    classify,
    enumerate_states,
    greedy_proper_coloring,
)
from .flow import audit_flow_bounds
from .graph import (
    GraphParseError,
    GraphTooLargeError,
    build_separator_schedule,
    find_minimal_order,
    load_order,
    read_graph,
    vertex_separation_number,
)
from .sampler import (
    SampleResult,
    SamplerParams,
    resolve_steps,
    sample_proper_coloring,
    uniformity_test,
)

SCHEMA = "colorsampler/1"
COMMANDS = ("sample", "enumerate", "mix-time", "flow-audit", "vsn", "uniformity")


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", required=True, metavar="FILE", help="edge-list file")
    common.add_argument("--colors", type=int, metavar="K", help="number of colors")
    common.add_argument("--delta", type=float, default=0.05, metavar="D")
    common.add_argument("--steps", type=int, metavar="N", help="run length override")
    common.add_argument("--seed", type=int, default=0, metavar="S")
    common.add_argument("--chain", choices=[c.value for c in ChainKind],
                        default=ChainKind.SINGLE_FLAW.value)
    common.add_argument("--order", metavar="FILE", help="linear order (permutation of 1..n)")
    common.add_argument("--trials", type=int, metavar="N")
    common.add_argument("--exact-tau", action="store_true",
                        help="use the exact mixing time for the run length")
    common.add_argument("--honor-theory", action="store_true",
                        help="use the theoretical mixing-time bound for the run length")
    common.add_argument("--workers", type=int, metavar="W",
                        help="run sampler attempts in W parallel processes")

    parser = argparse.ArgumentParser(prog="colorsampler", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _graph_info(args, g) -> dict:
    return {"path": args.graph, "n": g.n, "m": g.m, "max_degree": g.max_degree}


def _need_colors(args) -> int:
    if args.colors is None:
        raise UsageError(f"{args.command} needs --colors")
    return args.colors


def _order(args, g):
    if args.order:
        with open(args.order) as fh:
            return load_order(fh.read(), g.n)
    order, _ = find_minimal_order(g)
    return order


def _steps(args, g, params: SamplerParams, space=None) -> int:
    if args.steps is not None:
        return args.steps
    if args.exact_tau:
        return resolve_steps(g, params, "exact", space)
    if args.honor_theory:
        return resolve_steps(g, params, "theory")
    bound = resolve_steps(g, params, "theory")
    print(f"theoretical run length for delta1 is {bound} steps; pass --steps, "
          "--exact-tau or --honor-theory", file=sys.stderr)
    raise UsageError("no run length chosen")


def _sample(args, g) -> tuple[dict, int]:
    k = _need_colors(args)
    params = SamplerParams(k, args.delta, None, args.seed)
    steps = _steps(args, g, params)
    params = SamplerParams(k, args.delta, steps, args.seed)
    if args.chain == ChainKind.GLAUBER.value:
        cfg = ChainConfig.for_graph(g, k, ChainKind.GLAUBER)
        final = simulate(g, cfg, greedy_proper_coloring(g, k), steps, args.seed)
        result = SampleResult(final, True, True, 1, steps, args.seed, 0.0)
    else:
        result = sample_proper_coloring(g, params, workers=args.workers)
    if classify(g, result.coloring).kind is not Kind.PROPER:
        raise AssertionError(f"sampler emitted an improper coloring {result.coloring}")
    print(f"sampled in {result.wall_time:.3f}s after {result.attempts} attempt(s)",
          file=sys.stderr)
    eps = SamplerParams.epsilon(k, g.max_degree)
    doc = {
        "k": k,
        "chain": args.chain,
        "delta": args.delta,
        "delta1": params.delta1(g.n),
        "max_attempts": params.attempts(g.n),
        "epsilon": eps if math.isfinite(eps) else None,
        **result.to_dict(),
    }
    return doc, 0


def _enumerate(args, g) -> tuple[dict, int]:
    space = enumerate_states(g, _need_colors(args))
    return space.summary(), 0


def _mix_time(args, g) -> tuple[dict, int]:
    k = _need_colors(args)
    kind = ChainKind(args.chain)
    cfg = ChainConfig.for_graph(g, k, kind)
    space = enumerate_states(g, k)
    exact_t = exact_mixing_time(build_transition_matrix(g, cfg, space), args.delta)
    bound = None
    if kind is ChainKind.SINGLE_FLAW:
        _, pw = find_minimal_order(g)
        lam = pw / math.log2(g.n) if g.n > 1 else 0.0
        bound = theoretical_tau_bound(g.n, g.max_degree, k, pw, lam, args.delta)
    return {"k": k, "chain": args.chain, "delta": args.delta, "exact_t": exact_t,
            "theoretical_bound": bound, "states": space.size if kind is ChainKind.SINGLE_FLAW
            else space.num_proper}, 0


def _flow_audit(args, g) -> tuple[dict, int]:
    k = _need_colors(args)
    ChainConfig.for_graph(g, k)
    space = enumerate_states(g, k)
    schedule = build_separator_schedule(g, _order(args, g))
    report = audit_flow_bounds(g, schedule, space, k)
    doc = report.to_dict(space)
    doc["vsn"] = schedule.vsn
    doc["path_length"] = schedule.total_length
    doc["states"] = space.size
    return doc, 0 if report.passed else 1


def _vsn(args, g) -> tuple[dict, int]:
    order, vsn = find_minimal_order(g)
    doc = {"vsn": vsn, "order": list(order.vertices)}
    if args.order:
        given = _order(args, g)
        doc["given_order"] = list(given.vertices)
        doc["given_order_vsn"] = vertex_separation_number(g, given)
    return doc, 0


def _uniformity(args, g) -> tuple[dict, int]:
    k = _need_colors(args)
    space = enumerate_states(g, k)
    params = SamplerParams(k, args.delta, None, args.seed)
    steps = _steps(args, g, params, space)
    params = SamplerParams(k, args.delta, steps, args.seed)
    # Empirical TV to uniform scales like sqrt(outcomes / trials).
    trials = args.trials if args.trials is not None else max(50_000, 2000 * space.num_proper)
    report = uniformity_test(g, params, trials, space)
    doc = {"k": k, "steps": steps, "seed": args.seed, **report.to_dict()}
    return doc, 0 if report.passed else 1


HANDLERS = {
    "sample": _sample,
    "enumerate": _enumerate,
    "mix-time": _mix_time,
    "flow-audit": _flow_audit,
    "vsn": _vsn,
    "uniformity": _uniformity,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        g = read_graph(args.graph)
        doc, code = HANDLERS[args.command](args, g)
    except (UsageError, GraphParseError, GraphTooLargeError, StateSpaceTooLargeError,
            ValueError, OSError) as exc:
        print(f"colorsampler {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"colorsampler {args.command}: {exc}", file=sys.stderr)
        return 1
    out = {"schema": SCHEMA, "command": args.command, "graph": _graph_info(args, g), **doc}
    print(json.dumps(out, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
