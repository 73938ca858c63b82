"""Almost-uniform sampling of proper colorings by repeated Single-Flaw runs."""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import stats

from .chain import (
    ChainConfig,
    build_transition_matrix,
    exact_mixing_time,
    make_rng,
    simulate,
    simulate_batch,
    theoretical_tau_bound,
)
from .colorings import (
    Coloring,
    Kind,
    StateSpace,
    classify,
    classify_batch,
    enumerate_states,
    greedy_proper_coloring,
)
from .graph import Graph, find_minimal_order

__all__ = [
    "SampleResult",
    "SamplerParams",
    "UniformityReport",
    "resolve_steps",
    "sample_batch",
    "sample_proper_coloring",
    "uniformity_test",
    "uniformity_from_counts",
]


@dataclass(frozen=True)
class SamplerParams:
    """Inputs of the sampler.

    ``steps`` is the run length of every attempt; ``None`` means it must be
    resolved with :func:`resolve_steps` first.
    """

    k: int
    delta: float = 0.05
    steps: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.steps is not None and self.steps < 0:
            raise ValueError("steps must be nonnegative")

    def delta1(self, n: int) -> float:
        """Per-run distance target ``delta / (kn + 1)^2``."""
        return self.delta / (self.k * n + 1) ** 2

    def attempts(self, n: int) -> int:
        """Number of runs ``ceil(ln(3/delta) (kn + 2)^2)``."""
        return math.ceil(math.log(3 / self.delta) * (self.k * n + 2) ** 2)

    @staticmethod
    def epsilon(k: int, max_degree: int) -> float:
        """Slack with ``k = (1 + epsilon) * max_degree``."""
        return math.inf if max_degree == 0 else k / max_degree - 1


@dataclass(frozen=True)
class SampleResult:
    coloring: Coloring
    is_proper: bool
    from_chain: bool
    attempts: int
    steps: int
    seed: int
    wall_time: float = field(compare=False)

    def to_dict(self) -> dict:
        # Wall time stays out so identical seeds give identical documents.
        return {
            "coloring": list(self.coloring),
            "is_proper": self.is_proper,
            "from_chain": self.from_chain,
            "attempts": self.attempts,
            "steps": self.steps,
            "seed": self.seed,
        }


def _check_colors(g: Graph, k: int) -> None:
    if k < g.max_degree + 2:
        raise ValueError(
            f"k = {k} is below max degree + 2 = {g.max_degree + 2}, which the "
            "Single-Flaw state space requires"
        )


def resolve_steps(g: Graph, params: SamplerParams,
                  mode: Literal["exact", "theory"] = "exact",
                  space: StateSpace | None = None) -> int:
    """Run length for ``delta1``: exact mixing time, or the congestion bound."""
    _check_colors(g, params.k)
    d1 = params.delta1(g.n)
    if mode == "theory":
        _, pw = find_minimal_order(g)
        lam = pw / math.log2(g.n) if g.n > 1 else 0.0
        return math.ceil(theoretical_tau_bound(g.n, g.max_degree, params.k, pw, lam, d1))
    if space is None:
        space = enumerate_states(g, params.k)
    cfg = ChainConfig.for_graph(g, params.k)
    return exact_mixing_time(build_transition_matrix(g, cfg, space), d1)


def _run_attempt(g: Graph, cfg: ChainConfig, start: Coloring, steps: int, seed: int):
    final = simulate(g, cfg, start, steps, seed)
    return final, classify(g, final).kind is Kind.PROPER


def _attempt_seeds(params: SamplerParams, n: int) -> list[int]:
    children = np.random.SeedSequence(params.seed).spawn(params.attempts(n))
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


def sample_proper_coloring(g: Graph, params: SamplerParams,
                           workers: int | None = None) -> SampleResult:
    """Run up to ``attempts`` independent chains from the greedy coloring.

    The first run whose final state is proper is returned; otherwise the
    greedy coloring itself is returned with ``from_chain`` false. Attempt
    ``i`` always uses the ``i``-th seed spawned from ``params.seed``, so
    ``workers`` (parallel processes) does not change the result.
    """
    _check_colors(g, params.k)
    if params.steps is None:
        raise ValueError("params.steps is unset; call resolve_steps first")
    start = greedy_proper_coloring(g, params.k)
    cfg = ChainConfig.for_graph(g, params.k)
    tic = time.perf_counter()
    seeds = _attempt_seeds(params, g.n)

    def done(final, attempt, from_chain=True):
        return SampleResult(final, True, from_chain, attempt, params.steps, params.seed,
                            time.perf_counter() - tic)

    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for lo in range(0, len(seeds), workers):
                chunk = seeds[lo : lo + workers]
                runs = pool.map(_run_attempt, *zip(*[(g, cfg, start, params.steps, s)
                                                     for s in chunk]))
                for offset, (final, ok) in enumerate(runs):
                    if ok:
                        return done(final, lo + offset + 1)
    else:
        for attempt, seed in enumerate(seeds, start=1):
            final, ok = _run_attempt(g, cfg, start, params.steps, seed)
            if ok:
                return done(final, attempt)
    return done(start, len(seeds), from_chain=False)


def sample_batch(g: Graph, params: SamplerParams, trials: int,
                 rng: np.random.Generator | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sampler: ``trials`` independent outputs at once.

    Every trial follows the same attempt loop as
    :func:`sample_proper_coloring`; trials still unfinished after an
    attempt are rerun together. Returns ``(colorings, attempts_used)``.
    """
    _check_colors(g, params.k)
    if params.steps is None:
        raise ValueError("params.steps is unset; call resolve_steps first")
    if rng is None:
        rng = make_rng(params.seed)
    cfg = ChainConfig.for_graph(g, params.k)
    start = np.array(greedy_proper_coloring(g, params.k), dtype=np.int64)
    out = np.tile(start, (trials, 1))
    used = np.zeros(trials, dtype=np.int64)
    pending = np.arange(trials)
    for attempt in range(1, params.attempts(g.n) + 1):
        if len(pending) == 0:
            break
        final = simulate_batch(g, cfg, np.tile(start, (len(pending), 1)), params.steps, rng)
        proper, _ = classify_batch(g, final)
        done = pending[proper]
        out[done] = final[proper]
        used[pending] = attempt
        pending = pending[~proper]
    return out, used


@dataclass(frozen=True)
class UniformityReport:
    trials: int
    outcomes: int
    counts: np.ndarray
    tv: float
    chi2: float
    chi2_critical: float
    p_value: float
    tv_tolerance: float
    alpha: float

    @property
    def passed(self) -> bool:
        return self.tv <= self.tv_tolerance and self.chi2 < self.chi2_critical

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "outcomes": self.outcomes,
            "tv": self.tv,
            "tv_tolerance": self.tv_tolerance,
            "chi2": self.chi2,
            "chi2_critical": self.chi2_critical,
            "p_value": self.p_value,
            "passed": self.passed,
        }


def uniformity_from_counts(counts, tv_tolerance: float = 0.02,
                           alpha: float = 0.01) -> UniformityReport:
    """Empirical TV to uniform and a chi-square goodness-of-fit test."""
    counts = np.asarray(counts, dtype=np.int64)
    trials = int(counts.sum())
    m = len(counts)
    if trials < 10 * m:
        warnings.warn(f"{trials} trials over {m} outcomes gives a low-power test", stacklevel=2)
    freq = counts / trials
    tv = 0.5 * float(np.abs(freq - 1.0 / m).sum())
    chi2, p_value = stats.chisquare(counts)
    critical = float(stats.chi2.ppf(1 - alpha, m - 1))
    return UniformityReport(trials, m, counts, tv, float(chi2), critical, float(p_value),
                            tv_tolerance, alpha)


def uniformity_test(g: Graph, params: SamplerParams, trials: int, space: StateSpace,
                    tv_tolerance: float = 0.02, alpha: float = 0.01) -> UniformityReport:
    """Tally sampler outputs over the proper colorings of ``space``."""
    colorings, _ = sample_batch(g, params, trials)
    idx = space.lookup(colorings)
    if np.any(idx < 0) or np.any(idx >= space.num_proper):
        raise AssertionError("sampler emitted a coloring that is not proper")
    counts = np.bincount(idx, minlength=space.num_proper)
    return uniformity_from_counts(counts, tv_tolerance, alpha)

