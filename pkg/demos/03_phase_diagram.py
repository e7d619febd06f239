#!/usr/bin/env python3
"""Phase diagram of the type-enumeration minimization for a binary pair.

The (s, R) strip splits into seven regions A..G according to which closed
form achieves min_delta L(R, s, delta):

    C u F u G  delta* = p          (typical bin occupancy)
    B          delta* = h^-1(R)    (glassy phase)
    A u D u E  delta* = p_s        (small type classes dominate)

Solid boundaries separate the three main phases; dashed ones split
sub-phases that share a closed form.

Run:  python demos/03_phase_diagram.py   (writes phase_diagram.png)
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from swexp import binary_entropy, classify_region, tilted_crossover
from swexp.source_model import LN2
from swexp.tce_binary import boundary_rate

p = 0.1
s_vals = np.linspace(0.0, 4.0, 401)
r_vals = np.linspace(0.0, LN2, 301)

# color-coded region map
codes = {r: i for i, r in enumerate("ABCDEFG")}
grid = np.empty((len(r_vals), len(s_vals)))
for j, s in enumerate(s_vals):
    for i, R in enumerate(r_vals):
        grid[i, j] = codes[classify_region(p, R, s)]

fig, ax = plt.subplots(figsize=(8, 5))
ax.imshow(grid, origin="lower", aspect="auto", alpha=0.35, cmap="tab10",
          extent=[s_vals[0], s_vals[-1], r_vals[0], r_vals[-1]])

hp = binary_entropy(p)
hps = np.array([binary_entropy(tilted_crossover(p, s)) for s in s_vals])
left = s_vals <= 1
right = ~left
rs = np.array([boundary_rate(p, s) if s > 1 else np.nan for s in s_vals])

ax.plot(s_vals[left], np.full(left.sum(), hp), "k-", lw=2)        # C | B
ax.plot(s_vals[left], hps[left], "b-", lw=2)                      # B | A
ax.plot(s_vals[right], rs[right], "r-", lw=2)                     # F | E
ax.plot(s_vals[right], np.full(right.sum(), hp), "k--", lw=1)     # D | E
ax.plot(s_vals[right], hps[right], "b--", lw=1)                   # F | G

# label each region at a representative interior point
anchors = {"A": (0.4, 0.67), "B": (0.35, 0.48), "C": (0.5, 0.15),
           "D": (2.5, 0.55), "E": (2.5, 0.26), "F": (1.6, 0.16), "G": (2.0, 0.03)}
for name, (s, R) in anchors.items():
    assert classify_region(p, R, s) == name, (name, classify_region(p, R, s))
    ax.annotate(name, (s, R), fontsize=14, fontweight="bold")

ax.set_xlabel("s")
ax.set_ylabel("R (nats)")
ax.set_title(f"phases of the distance-enumeration minimization, p = {p}")
fig.tight_layout()
fig.savefig("phase_diagram.png", dpi=120)
print("wrote phase_diagram.png")
