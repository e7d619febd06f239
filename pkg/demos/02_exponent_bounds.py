#!/usr/bin/env python3
"""Erasure/list exponent bounds e1, e2 and the positivity boundary.

Sweeps the baseline bound over rate for several thresholds and draws the
r_min / t_max boundary of the region where the exponent is positive.

Run:  python demos/02_exponent_bounds.py   (writes exponent_bounds.png)
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from swexp import BinarySymmetricPair, binary_entropy, e1, e2, r_min, t_max

bss = BinarySymmetricPair(0.1)
rates = np.linspace(0.2, 0.69, 60)

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))

# --- e1 over rate, one curve per threshold ---------------------------------
for T in (-0.1, 0.0, 0.05):
    vals = [e1(bss, R, T).value for R in rates]
    ax1.plot(rates, vals, label=f"T = {T}")
ax1.axvline(binary_entropy(0.1), color="gray", ls=":", label="H(X|Y)")
ax1.set_xlabel("R (nats/symbol)")
ax1.set_ylabel("e1(R, T) (nats)")
ax1.set_title("erasure-event exponent")
ax1.legend()

# e2 = e1 + T: the undetected-error / list-size side of the trade-off
R0 = 0.5
for T in (-0.1, 0.0, 0.05):
    a, b = e1(bss, R0, T), e2(bss, R0, T)
    print(f"R={R0}, T={T:+.2f}:  e1={a.value:.5f}  e2={b.value:.5f}  "
          f"(argmax rho={a.argmax['rho']:.3f}, s={a.argmax['s']:.3f})")

# --- the boundary of the positive-exponent region ---------------------------
ts = np.linspace(0.0, 0.08, 25)
rmins = [r_min(bss, T) for T in ts]
ax2.plot(rmins, ts, label="r_min(T)")
r_grid = np.linspace(rmins[0] + 1e-3, rmins[-1], 25)
ax2.plot(r_grid, [t_max(bss, R) for R in r_grid], "--", label="t_max(R)")
ax2.set_xlabel("R (nats/symbol)")
ax2.set_ylabel("T (nats/symbol)")
ax2.set_title("positivity boundary (the two curves are inverses)")
ax2.legend()

fig.tight_layout()
fig.savefig("exponent_bounds.png", dpi=120)
print("wrote exponent_bounds.png")
print("r_min(0) =", r_min(bss, 0.0), "= H(X|Y) =", binary_entropy(0.1))
