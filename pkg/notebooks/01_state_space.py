"""Walk through the state space of a small graph and the flaw-repair map.

Run: python3 notebooks/01_state_space.py
"""

from pathlib import Path

from colorsampler import build_flaw_repair_map, enumerate_states, read_graph

HERE = Path(__file__).parent

for name in ("k3", "p3", "c4", "star3"):
    g = read_graph(HERE / "graphs" / f"{name}.txt")
    k = g.max_degree + 2
    space = enumerate_states(g, k)
    rep = build_flaw_repair_map(g, space, k)
    print(f"{name}: n={g.n} m={g.m} k={k}  proper={space.num_proper} "
          f"singly-flawed={space.num_singly_flawed}  "
          f"flawed/proper={space.num_singly_flawed / space.num_proper:.2f} (cap kn={k * g.n})  "
          f"max repair pre-images={rep.max_preimages}")

g = read_graph(HERE / "graphs" / "k3.txt")
space = enumerate_states(g, 4)
rep = build_flaw_repair_map(g, space, 4)
print("\nsome repairs on the triangle with 4 colors:")
for row in space.singly_flawed[:6]:
    sigma = tuple(int(c) for c in row)
    print(f"  {sigma} -> {rep(sigma)}")
