import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from colorsampler.chain import ChainConfig, make_rng, simulate_batch
from colorsampler.colorings import (
    Kind,
    classify,
    classify_batch,
    enumerate_states,
    greedy_proper_coloring,
)
from colorsampler.graph import Graph
from colorsampler.sampler import (
    SamplerParams,
    resolve_steps,
    sample_batch,
    sample_proper_coloring,
    uniformity_from_counts,
    uniformity_test,
)


class TestParams:
    def test_derived_quantities(self):
        p = SamplerParams(4, delta=0.05)
        assert p.delta1(3) == pytest.approx(0.05 / 169)
        assert p.attempts(3) == math.ceil(math.log(60) * 196)

    def test_epsilon(self):
        assert SamplerParams.epsilon(4, 2) == 1.0
        assert SamplerParams.epsilon(2, 0) == math.inf

    @pytest.mark.parametrize("delta", [0, 1, -0.5, 2])
    def test_bad_delta(self, delta):
        with pytest.raises(ValueError):
            SamplerParams(4, delta=delta)


class TestSample:
    def test_proper_and_repeatable(self, k3):
        params = SamplerParams(4, 0.05, steps=53, seed=11)
        first = sample_proper_coloring(k3, params)
        second = sample_proper_coloring(k3, params)
        assert classify(k3, first.coloring).kind is Kind.PROPER
        assert first == second
        assert first.to_dict() == second.to_dict()
        assert "wall_time" not in first.to_dict()

    def test_workers_match_sequential(self, p3):
        params = SamplerParams(4, 0.05, steps=30, seed=5)
        assert sample_proper_coloring(p3, params, workers=2) == \
            sample_proper_coloring(p3, params)

    def test_zero_steps_returns_start(self, p3):
        result = sample_proper_coloring(p3, SamplerParams(4, 0.05, steps=0, seed=1))
        assert result.attempts == 1 and result.from_chain

    def test_needs_steps(self, p3):
        with pytest.raises(ValueError, match="resolve_steps"):
            sample_proper_coloring(p3, SamplerParams(4))

    def test_needs_spare_color(self, k3):
        with pytest.raises(ValueError, match="max degree"):
            sample_proper_coloring(k3, SamplerParams(3, steps=5))

    def test_batch_outputs_proper(self):
        g = Graph.cycle(4)
        out, used = sample_batch(g, SamplerParams(4, steps=20, seed=2), 500)
        assert out.shape == (500, 4)
        assert all(classify(g, tuple(r)).kind is Kind.PROPER for r in out)
        assert used.min() >= 1


class TestSteps:
    def test_exact(self, k3):
        assert resolve_steps(k3, SamplerParams(4, 0.05)) == 53

    def test_theory_dominates_exact(self, p3):
        params = SamplerParams(4, 0.05)
        assert resolve_steps(p3, params, "theory") >= resolve_steps(p3, params, "exact")


class TestUniformity:
    def test_uniform_counts_pass(self):
        report = uniformity_from_counts([1000] * 24)
        assert report.tv == 0 and report.chi2 == 0 and report.passed

    def test_skewed_counts_fail(self):
        counts = [1000] * 23 + [3000]
        report = uniformity_from_counts(counts)
        assert not report.passed
        assert report.tv == pytest.approx(0.5 * (23 * abs(1000 / 26000 - 1 / 24)
                                                 + abs(3000 / 26000 - 1 / 24)))

    def test_low_power_warning(self):
        with pytest.warns(UserWarning, match="low-power"):
            uniformity_from_counts([3, 4, 5])

    def test_short_runs_are_detected(self, k3):
        space = enumerate_states(k3, 4)
        report = uniformity_test(k3, SamplerParams(4, steps=1, seed=0), 5000, space)
        assert not report.passed

    def test_p3_short_run(self, p3):
        space = enumerate_states(p3, 4)
        steps = resolve_steps(p3, SamplerParams(4, 0.05), space=space)
        report = uniformity_test(p3, SamplerParams(4, steps=steps, seed=4), 40_000, space)
        assert report.passed
        assert np.all(report.counts > 0)


def test_edgeless_first_attempt():
    g = Graph.empty(4)
    result = sample_proper_coloring(g, SamplerParams(3, 0.3, steps=25, seed=0))
    assert result.attempts == 1 and result.from_chain


def test_attempt_success_rate_matches_stationary_mass(p3):
    params = SamplerParams(4, 0.1)
    steps = resolve_steps(p3, params)
    trials = 40_000
    starts = np.tile(greedy_proper_coloring(p3, 4), (trials, 1))
    final = simulate_batch(p3, ChainConfig.for_graph(p3, 4), starts, steps, make_rng(8))
    rate = classify_batch(p3, final)[0].mean()
    # Standard error is about 0.0025.
    assert abs(rate - 36 / 64) < 0.012
    assert rate >= 1 / (4 * 3 + 1) - params.delta1(3)


@given(st.integers(2, 30), st.integers(1, 40), st.floats(1e-6, 0.999))
def test_param_invariants(k, n, delta):
    p = SamplerParams(k, delta)
    assert p.attempts(n) >= 1
    assert p.delta1(n) < delta
    assert p.attempts(n) == math.ceil(math.log(3 / delta) * (k * n + 2) ** 2)
