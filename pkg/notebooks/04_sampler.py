"""Sample proper colorings of the triangle and check the output histogram.

Run: python3 notebooks/04_sampler.py
"""

import numpy as np

from colorsampler import (
    Graph,
    SamplerParams,
    enumerate_states,
    resolve_steps,
    sample_proper_coloring,
    uniformity_test,
)

g = Graph.complete(3)
space = enumerate_states(g, 4)
steps = resolve_steps(g, SamplerParams(4, 0.05), "exact", space)
theory = resolve_steps(g, SamplerParams(4, 0.05), "theory")
print(f"run length: exact {steps} steps, congestion bound {theory} steps")

one = sample_proper_coloring(g, SamplerParams(4, 0.05, steps, seed=1))
print(f"one sample: {one.coloring} after {one.attempts} attempt(s)")

for run_length in (1, 5, steps):
    rep = uniformity_test(g, SamplerParams(4, 0.05, run_length, seed=7), 50_000, space)
    print(f"steps={run_length:3}  TV={rep.tv:.4f}  chi2={rep.chi2:9.1f} "
          f"(99% cutoff {rep.chi2_critical:.1f})  {'uniform' if rep.passed else 'biased'}")

print("counts at the exact run length:", np.array2string(rep.counts, max_line_width=100))
