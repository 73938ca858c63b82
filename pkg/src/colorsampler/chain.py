"""Single-Flaw and Glauber dynamics: stepping, exact kernels and mixing times."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .colorings import (
    Coloring,
    Kind,
    StateSpace,
    available_colors,
    classify,
    classify_batch,
)
from .graph import Graph

__all__ = [
    "ChainConfig",
    "ChainKind",
    "ConvergenceError",
    "TransitionMatrix",
    "apply_single_flaw_move",
    "build_transition_matrix",
    "exact_mixing_time",
    "glauber_step",
    "make_rng",
    "simulate",
    "simulate_batch",
    "single_flaw_step",
    "theoretical_tau_bound",
    "tv_distance",
    "worst_case_tv",
]

DEFAULT_MATRIX_BUDGET = 2 * 10**4
TV_SLACK = 1e-10


class ChainKind(enum.Enum):
    SINGLE_FLAW = "single-flaw"
    GLAUBER = "glauber"


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChainConfig:
    k: int
    n: int
    kind: ChainKind = ChainKind.SINGLE_FLAW
    laziness: Fraction = Fraction(1, 2)

    @classmethod
    def for_graph(cls, g: Graph, k: int, kind: ChainKind | str = ChainKind.SINGLE_FLAW):
        kind = ChainKind(kind)
        if k < g.max_degree + 2:
            raise ValueError(
                f"k = {k} is below max degree + 2 = {g.max_degree + 2}; "
                "the state space needs a spare color for every flawed vertex"
            )
        return cls(k=k, n=g.n, kind=kind)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator from a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed))


def apply_single_flaw_move(g: Graph, sigma: Sequence[int], v: int, c: int) -> Coloring:
    """Recolor ``v`` with ``c``; keep ``sigma`` if the result leaves the state space."""
    proposal = list(sigma)
    proposal[v - 1] = c
    if classify(g, proposal).in_state_space:
        return tuple(proposal)
    return tuple(sigma)


def single_flaw_step(g: Graph, cfg: ChainConfig, sigma: Sequence[int], rng) -> Coloring:
    if not classify(g, sigma).in_state_space:
        raise ValueError(f"{tuple(sigma)} is neither proper nor singly-flawed")
    kn = cfg.k * cfg.n
    # One draw over 2kn outcomes: the lower half is the lazy idle move.
    r = int(rng.integers(2 * kn))
    if r < kn:
        return tuple(sigma)
    r -= kn
    return apply_single_flaw_move(g, sigma, r // cfg.k + 1, r % cfg.k + 1)


def glauber_step(g: Graph, cfg: ChainConfig, sigma: Sequence[int], rng) -> Coloring:
    if classify(g, sigma).kind is not Kind.PROPER:
        raise ValueError(f"Glauber dynamics needs a proper coloring, got {tuple(sigma)}")
    r = int(rng.integers(2 * cfg.n))
    if r < cfg.n:
        return tuple(sigma)
    v = r - cfg.n + 1
    options = sorted(available_colors(g, sigma, v, cfg.k))
    if not options:
        raise ValueError(f"vertex {v} has no available color with k = {cfg.k}")
    out = list(sigma)
    out[v - 1] = options[int(rng.integers(len(options)))]
    return tuple(out)


def simulate(g: Graph, cfg: ChainConfig, start: Sequence[int], steps: int, seed: int,
             check: bool = False) -> Coloring:
    """Run ``steps`` transitions from ``start`` with a fresh seeded generator."""
    rng = make_rng(seed)
    step = single_flaw_step if cfg.kind is ChainKind.SINGLE_FLAW else glauber_step
    sigma = tuple(start)
    for _ in range(steps):
        sigma = step(g, cfg, sigma, rng)
        if check and not classify(g, sigma).in_state_space:
            raise AssertionError(f"left the state space at {sigma}")
    return sigma


def simulate_batch(g: Graph, cfg: ChainConfig, starts: np.ndarray, steps: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Advance ``B`` independent Single-Flaw chains in lockstep.

    Each chain uses the same per-step law as :func:`single_flaw_step`.
    """
    if cfg.kind is not ChainKind.SINGLE_FLAW:
        raise NotImplementedError("batched simulation covers Single-Flaw dynamics only")
    state = np.array(starts, dtype=np.int64, copy=True)
    batch = state.shape[0]
    kn = cfg.k * cfg.n
    rows = np.arange(batch)
    for _ in range(steps):
        r = rng.integers(2 * kn, size=batch)
        active = r >= kn
        r = r - kn
        v = r[active] // cfg.k
        c = r[active] % cfg.k + 1
        idx = rows[active]
        proposal = state[idx]
        proposal[np.arange(len(idx)), v] = c
        proper, flawed = classify_batch(g, proposal)
        ok = proper | flawed
        state[idx[ok]] = proposal[ok]
    return state


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Exact kernel stored as integer counts over a common denominator.

    ``P[i, j] = counts[i, j] / denominator``.
    """

    counts: sp.csr_matrix
    denominator: int
    kind: ChainKind

    @property
    def dimension(self) -> int:
        return self.counts.shape[0]

    def entry(self, i: int, j: int) -> Fraction:
        return Fraction(int(self.counts[i, j]), self.denominator)

    def to_dense(self) -> np.ndarray:
        return self.counts.toarray() / self.denominator

    def is_symmetric(self) -> bool:
        return (self.counts != self.counts.T).nnz == 0

    def rows_sum_to_one(self) -> bool:
        return bool(np.all(np.asarray(self.counts.sum(axis=1)).ravel() == self.denominator))

    def uniform_is_stationary(self) -> bool:
        return bool(np.all(np.asarray(self.counts.sum(axis=0)).ravel() == self.denominator))

    def min_diagonal(self) -> Fraction:
        return Fraction(int(self.counts.diagonal().min()), self.denominator)

    def is_irreducible(self) -> bool:
        ncomp, _ = connected_components(self.counts, directed=True, connection="strong")
        return ncomp == 1

    def is_aperiodic(self) -> bool:
        # A positive diagonal entry on an irreducible chain forces period one.
        return bool(np.any(self.counts.diagonal() > 0))


def build_transition_matrix(g: Graph, cfg: ChainConfig, space: StateSpace,
                            budget: int = DEFAULT_MATRIX_BUDGET) -> TransitionMatrix:
    """Exact kernel on ``space`` (Single-Flaw) or on its proper part (Glauber)."""
    if cfg.kind is ChainKind.SINGLE_FLAW:
        states = space.states
    else:
        states = space.proper.astype(np.int64)
    size = len(states)
    if size > budget:
        raise ValueError(f"{size} states exceeds the matrix budget of {budget}")
    n, k = cfg.n, cfg.k
    if cfg.kind is ChainKind.SINGLE_FLAW:
        return _single_flaw_matrix(g, space, states, n, k)
    return _glauber_matrix(g, space, states, n, k)


def _single_flaw_matrix(g, space, states, n, k):
    size = len(states)
    denom = 2 * k * n
    diag = np.full(size, k * n, dtype=np.int64)
    rows, cols = [], []
    for v in range(n):
        for c in range(1, k + 1):
            proposal = states.copy()
            proposal[:, v] = c
            target = space.lookup(proposal)
            moved = (target >= 0) & (states[:, v] != c)
            diag += ~moved
            rows.append(np.nonzero(moved)[0])
            cols.append(target[moved])
    rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    data = np.ones(len(rows), dtype=np.int64)
    counts = sp.coo_matrix((data, (rows, cols)), shape=(size, size)).tocsr()
    counts = counts + sp.diags(diag, format="csr", dtype=np.int64)
    counts.sum_duplicates()
    return TransitionMatrix(counts.tocsr(), denom, ChainKind.SINGLE_FLAW)


def _glauber_matrix(g, space, states, n, k):
    size = len(states)
    lcm = math.lcm(*range(1, k + 1))
    denom = 2 * n * lcm
    # Glauber's space is C_p alone; index proper colorings directly.
    proper_index = {tuple(int(c) for c in row): i for i, row in enumerate(states)}
    diag = np.full(size, n * lcm, dtype=np.int64)
    rows, cols, data = [], [], []
    for i, row in enumerate(states):
        sigma = tuple(int(c) for c in row)
        for v in range(1, n + 1):
            options = available_colors(g, sigma, v, k)
            if not options:
                raise ValueError(f"vertex {v} has no available color with k = {k}")
            w = lcm // len(options)
            for c in options:
                if c == sigma[v - 1]:
                    diag[i] += w
                    continue
                nxt = list(sigma)
                nxt[v - 1] = c
                rows.append(i)
                cols.append(proper_index[tuple(nxt)])
                data.append(w)
    counts = sp.coo_matrix((np.array(data, dtype=np.int64), (rows, cols)), shape=(size, size))
    counts = counts.tocsr() + sp.diags(diag, format="csr", dtype=np.int64)
    return TransitionMatrix(counts.tocsr(), denom, ChainKind.GLAUBER)


def tv_distance(mu, nu) -> float:
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != nu.shape:
        raise ValueError(f"dimension mismatch: {mu.shape} vs {nu.shape}")
    return 0.5 * float(np.abs(mu - nu).sum())


def worst_case_tv(P: np.ndarray, t: int) -> float:
    """max over starting states of TV(P^t(s, .), uniform)."""
    dist = np.linalg.matrix_power(P, t)
    return 0.5 * float(np.abs(dist - 1.0 / P.shape[0]).sum(axis=1).max())


def exact_mixing_time(P: TransitionMatrix, delta: float, max_steps: int = 100_000,
                      confirm: int = 10) -> int:
    """Smallest t with worst-start TV to uniform at most ``delta``.

    Rows of ``P^t`` are propagated in double precision; after the first
    crossing ``confirm`` further steps are checked to stay below ``delta``.
    """
    if delta >= 1:
        return 0
    if not (P.is_irreducible() and P.is_aperiodic()):
        raise ValueError("mixing time needs an irreducible, aperiodic chain")
    dense = P.to_dense()
    size = dense.shape[0]
    dist = np.eye(size)
    uniform = 1.0 / size
    history = []
    for t in range(max_steps + 1):
        tv = 0.5 * np.abs(dist - uniform).sum(axis=1).max()
        history.append(tv)
        if tv <= delta + TV_SLACK:
            probe = dist
            for _ in range(confirm):
                probe = probe @ dense
                if 0.5 * np.abs(probe - uniform).sum(axis=1).max() > delta + TV_SLACK:
                    break
            else:
                return t
        dist = dist @ dense
    raise ConvergenceError(
        f"worst-case TV still {history[-1]:.3e} > {delta} after {max_steps} steps "
        f"(last values: {', '.join(f'{x:.3e}' for x in history[-5:])})"
    )


def theoretical_tau_bound(n: int, max_degree: int, k: int, pw: int, lam: float,
                          delta: float) -> float:
    """Congestion-based upper bound on the mixing time.

    ``rho * (n ln k + ln(1/delta))`` with
    ``rho = 8 k^3 (lam + 1) n^5 log2(n) (k / (k - max_degree))^(2 pw)``.
    """
    if k < max_degree + 2:
        raise ValueError("bound requires k >= max degree + 2")
    if pw < 0:
        raise ValueError("pathwidth must be nonnegative")
    log_n = math.log2(n) if n > 1 else 0.0
    rho = 8 * k**3 * (lam + 1) * n**5 * log_n * (k / (k - max_degree)) ** (2 * pw)
    return rho * (n * math.log(k) + math.log(1 / delta))
