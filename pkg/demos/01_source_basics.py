#!/usr/bin/env python3
"""Joint sources and the information measures everything else is built on.

All quantities are in nats.  Run:  python demos/01_source_basics.py
"""

import numpy as np

from swexp import (
    BinarySymmetricPair,
    JointSource,
    binary_entropy,
    binary_entropy_inverse,
    conditional_entropy,
    conditional_x_given_y,
    kl_divergence,
    marginal_y,
)

# --- a correlated binary symmetric pair -----------------------------------
# P(x=y) = 1-p, split evenly over the two diagonal cells
bss = BinarySymmetricPair(0.1)
src = bss.to_joint()
print("BSS p=0.1 joint pmf:\n", src.pmf)
print("y-marginal:", marginal_y(src))
print("P(x|y):\n", conditional_x_given_y(src))

# the side information leaves h(p) nats of uncertainty per symbol
print("H(X|Y) =", conditional_entropy(src), " h(0.1) =", binary_entropy(0.1))

# --- a general asymmetric source -------------------------------------------
asym = JointSource(("0", "1"), ("0", "1"), [[0.50, 0.10], [0.15, 0.25]])
print("\nasymmetric source H(X|Y) =", conditional_entropy(asym))

# --- divergence and the binary entropy inverse ------------------------------
print("\nD((0.3,0.7) || (0.5,0.5)) =", kl_divergence([0.3, 0.7], [0.5, 0.5]))
print("D over disjoint supports  =", kl_divergence([1.0, 0.0], [0.0, 1.0]))

# h restricted to [0, 1/2] is invertible; the inverse drives the glassy
# branch of the type-enumeration exponent
for r in (0.1, 0.3, 0.6):
    d = binary_entropy_inverse(r)
    print(f"h^-1({r}) = {d:.6f}, h(h^-1({r})) = {binary_entropy(d):.6f}")

# validation rejects rather than renormalizes
try:
    JointSource(("0", "1"), ("0", "1"), [[0.6, 0.2], [0.1, 0.2]])
except Exception as exc:
    print("\nbad pmf rejected:", exc)
