"""Memoryless joint sources and the information measures built on them.

Everything downstream works with a joint PMF P(x, y) over a pair of finite
alphabets.  All information quantities are in nats; the convention
0 * ln 0 = 0 is applied throughout.  Distributions are validated at
construction and invalid input is rejected rather than renormalized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SourceSpecError, ZeroMarginal

PROB_ATOL = 1e-12

__all__ = [
    "JointSource",
    "BinarySymmetricPair",
    "as_joint_source",
    "marginal_x",
    "marginal_y",
    "conditional_x_given_y",
    "conditional_entropy",
    "entropy",
    "kl_divergence",
    "binary_entropy",
    "binary_entropy_inverse",
    "validate_distribution",
    "validate_conditional",
    "load_source",
    "source_from_dict",
]


@dataclass(frozen=True)
class JointSource:
    """Joint PMF of (X, Y) over finite alphabets.

    ``pmf[i, j] = P(x_i, y_j)`` with rows indexed by ``alphabet_x`` and
    columns by ``alphabet_y``.  Entries must be nonnegative, sum to 1
    within 1e-12, and every symbol must have positive marginal.
    """

    alphabet_x: tuple
    alphabet_y: tuple
    pmf: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet_x", tuple(self.alphabet_x))
        object.__setattr__(self, "alphabet_y", tuple(self.alphabet_y))
        pmf = np.asarray(self.pmf, dtype=float)
        if pmf.ndim != 2:
            raise SourceSpecError(f"pmf must be a 2-D matrix, got ndim={pmf.ndim}")
        if pmf.shape != (len(self.alphabet_x), len(self.alphabet_y)):
            raise SourceSpecError(
                f"pmf shape {pmf.shape} does not match alphabets "
                f"({len(self.alphabet_x)} x {len(self.alphabet_y)})"
            )
        if not np.all(np.isfinite(pmf)):
            bad = np.argwhere(~np.isfinite(pmf))[0]
            raise SourceSpecError(f"pmf entry at (x={bad[0]}, y={bad[1]}) is not finite")
        if np.any(pmf < 0):
            bad = np.argwhere(pmf < 0)[0]
            raise SourceSpecError(
                f"pmf entry at (x={bad[0]}, y={bad[1]}) is negative: {pmf[bad[0], bad[1]]}"
            )
        total = float(pmf.sum())
        if abs(total - 1.0) > PROB_ATOL:
            raise SourceSpecError(f"pmf entries sum to {total!r}, expected 1 within {PROB_ATOL}")
        row = pmf.sum(axis=1)
        if np.any(row <= 0):
            raise SourceSpecError(
                f"x-symbol {self.alphabet_x[int(np.argmin(row))]!r} has zero marginal"
            )
        col = pmf.sum(axis=0)
        if np.any(col <= 0):
            raise SourceSpecError(
                f"y-symbol {self.alphabet_y[int(np.argmin(col))]!r} has zero marginal"
            )
        pmf = pmf.copy()
        pmf.flags.writeable = False
        object.__setattr__(self, "pmf", pmf)

    @property
    def nx(self) -> int:
        return len(self.alphabet_x)

    @property
    def ny(self) -> int:
        return len(self.alphabet_y)


@dataclass(frozen=True)
class BinarySymmetricPair:
    """Correlated binary symmetric sources with crossover probability p.

    P(x, y) = (1 - p)/2 when x = y and p/2 when x != y, for x, y in {0, 1}.
    """

    p: float

    def __post_init__(self):
        if not (0.0 < self.p <= 0.5):
            raise DomainError(f"crossover probability must lie in (0, 1/2], got {self.p}")

    def to_joint(self) -> JointSource:
        p = self.p
        pmf = np.array([[(1 - p) / 2, p / 2], [p / 2, (1 - p) / 2]])
        return JointSource(("0", "1"), ("0", "1"), pmf)


def as_joint_source(src) -> JointSource:
    """Coerce a JointSource or BinarySymmetricPair to a JointSource."""
    if isinstance(src, JointSource):
        return src
    if isinstance(src, BinarySymmetricPair):
        return src.to_joint()
    raise TypeError(f"expected JointSource or BinarySymmetricPair, got {type(src).__name__}")


def validate_distribution(vec, name: str = "distribution") -> np.ndarray:
    """Check a probability vector: nonnegative, sums to 1 within 1e-12."""
    v = np.asarray(vec, dtype=float)
    if v.ndim != 1:
        raise SourceSpecError(f"{name} must be 1-D")
    if np.any(v < 0) or not np.all(np.isfinite(v)):
        raise SourceSpecError(f"{name} has a negative or non-finite entry")
    if abs(v.sum() - 1.0) > PROB_ATOL:
        raise SourceSpecError(f"{name} sums to {v.sum()!r}, expected 1 within {PROB_ATOL}")
    return v


def validate_conditional(mat, name: str = "conditional") -> np.ndarray:
    """Check a stochastic matrix: every row a probability vector."""
    m = np.asarray(mat, dtype=float)
    if m.ndim != 2:
        raise SourceSpecError(f"{name} must be 2-D")
    for i in range(m.shape[0]):
        validate_distribution(m[i], name=f"{name} row {i}")
    return m


def marginal_x(src: JointSource) -> np.ndarray:
    """P(x) = sum_y P(x, y)."""
    return as_joint_source(src).pmf.sum(axis=1)


def marginal_y(src: JointSource) -> np.ndarray:
    """P(y) = sum_x P(x, y)."""
    return as_joint_source(src).pmf.sum(axis=0)


def conditional_x_given_y(src: JointSource) -> np.ndarray:
    """P(x|y) = P(x, y)/P(y), returned as a matrix with rows x, columns y."""
    src = as_joint_source(src)
    py = marginal_y(src)
    if np.any(py <= 0):
        raise ZeroMarginal("some P(y) = 0; conditional undefined")
    return src.pmf / py[np.newaxis, :]


def entropy(dist) -> float:
    """Shannon entropy of a probability vector, in nats."""
    v = np.asarray(dist, dtype=float)
    pos = v > 0
    return float(-np.sum(v[pos] * np.log(v[pos])))


def conditional_entropy(src: JointSource) -> float:
    """H(X|Y) = -sum_{x,y} P(x, y) ln P(x|y), in nats."""
    src = as_joint_source(src)
    cond = conditional_x_given_y(src)
    pmf = src.pmf
    pos = pmf > 0
    return float(-np.sum(pmf[pos] * np.log(cond[pos])))


def kl_divergence(p, q) -> float:
    """D(P||Q) = sum_x P(x) ln(P(x)/Q(x)), in nats.

    Returns +inf when P puts mass where Q does not.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DomainError(f"shape mismatch: {p.shape} vs {q.shape}")
    pos = p > 0
    if np.any(q[pos] <= 0):
        return float("inf")
    return float(np.sum(p[pos] * np.log(p[pos] / q[pos])))


LN2 = float(np.log(2.0))


def binary_entropy(delta) -> float:
    """h(delta) = -delta ln delta - (1 - delta) ln(1 - delta), in nats."""
    d = float(delta)
    if not (0.0 <= d <= 1.0):
        raise DomainError(f"binary_entropy argument must be in [0, 1], got {d}")
    out = 0.0
    if d > 0:
        out -= d * np.log(d)
    if d < 1:
        out -= (1 - d) * np.log(1 - d)
    return float(out)


def binary_entropy_inverse(r) -> float:
    """Inverse of h on [0, 1/2]: the delta <= 1/2 with h(delta) = r.

    Bisection on [0, 1/2]; h is strictly increasing there.  Interval is
    narrowed to width 1e-12 so that h(h^-1(r)) = r within ~1e-10.
    """
    r = float(r)
    if not (0.0 <= r <= LN2 + 1e-15):
        raise DomainError(f"binary_entropy_inverse argument must be in [0, ln 2], got {r}")
    if r <= 0:
        return 0.0
    if r >= LN2:
        return 0.5
    lo, hi = 0.0, 0.5
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if binary_entropy(mid) < r:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def source_from_dict(spec: dict) -> JointSource:
    """Build a JointSource from the JSON source spec.

    Expected layout::

        {"alphabet_x": ["0", "1"],
         "alphabet_y": ["0", "1"],
         "pmf": [[0.45, 0.05], [0.05, 0.45]]}
    """
    for key in ("alphabet_x", "alphabet_y", "pmf"):
        if key not in spec:
            raise SourceSpecError(f"source spec is missing key {key!r}")
    return JointSource(tuple(spec["alphabet_x"]), tuple(spec["alphabet_y"]), spec["pmf"])


def load_source(path) -> JointSource:
    """Load and validate a JSON source spec from a file path."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SourceSpecError(f"{path}: not valid JSON ({exc})") from exc
    return source_from_dict(spec)
