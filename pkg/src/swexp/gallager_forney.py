"""Chernoff-style erasure/list exponents for random binning.

Core quantity::

    e0(rho, s) = -ln[ sum_y P(y) sum_x P(x|y)^(1-s) ( sum_x' P(x'|y)^(s/rho) )^rho ]

with 0 <= s <= rho <= 1.  The threshold-decoder exponents are

    e1(R, T) = sup_{0<=s<=rho<=1} [ e0(rho, s) + rho R - s T ]
    e2(R, T) = e1(R, T) + T

together with the boundary curves of the positivity region of e1:

    r_min(T) = inf (s T - e0(rho, s)) / rho      (rate threshold; = H(X|Y) at T=0)
    t_max(R) = sup (rho R + e0(rho, s)) / s      (threshold ceiling; inverse of r_min)

The objective of e1 is jointly concave on the triangle, so a coarse grid
(step 1/64) followed by coordinate-wise golden-section refinement finds the
supremum reliably, including at the boundary kinks s = rho and rho = 1 where
gradient methods stall.  rho -> 0 limits are evaluated at rho = 1e-6 with a
Richardson check against rho = 1e-5.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .source_model import as_joint_source, conditional_x_given_y, marginal_y

__all__ = ["ExponentResult", "e0", "e1", "e2", "r_min", "t_max"]

GRID_STEP = 1.0 / 64.0
RHO_FLOOR = 1e-6
PARAM_TOL = 1e-8


@dataclass
class ExponentResult:
    """An exponent value with the parameters that achieved it.

    ``value`` may be +inf, in which case ``diverged`` is True and the argmax
    records the largest parameters probed.  ``trace`` optionally keeps a small
    record of the grid/refinement stages.
    """

    value: float
    argmax: dict = field(default_factory=dict)
    diverged: bool = False
    trace: dict | None = None

    def __post_init__(self):
        if self.diverged and not math.isinf(self.value):
            raise ValueError("diverged results must carry value = +inf")


def _cond_and_marginal(src):
    src = as_joint_source(src)
    return conditional_x_given_y(src), marginal_y(src)


def _e0_batch(cond: np.ndarray, py: np.ndarray, rho: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Vectorized e0 over parameter arrays; rho must be > 0 and s <= rho.

    Uses plain powers: an exponent of exactly 0 counts every alphabet letter
    (0**0 = 1), so e0(rho, 0) = -rho ln|X|.
    """
    rho = np.asarray(rho, dtype=float)
    s = np.asarray(s, dtype=float)
    u = s / rho
    inner = np.power(cond[None, :, :], u[:, None, None]).sum(axis=1)  # (K, |Y|)
    mid = np.power(cond[None, :, :], (1.0 - s)[:, None, None]).sum(axis=1)  # (K, |Y|)
    z = (py[None, :] * mid * np.power(inner, rho[:, None])).sum(axis=1)
    return -np.log(z)


def e0(src, rho: float, s: float) -> float:
    """e0(rho, s) for rho in (0, 1], s in [0, rho]."""
    rho = float(rho)
    s = float(s)
    if not (0.0 < rho <= 1.0):
        raise DomainError(f"rho must be in (0, 1], got {rho}")
    if not (0.0 <= s <= rho + 1e-15):
        raise DomainError(f"s must be in [0, rho], got s={s}, rho={rho}")
    cond, py = _cond_and_marginal(src)
    return float(_e0_batch(cond, py, np.array([rho]), np.array([min(s, rho)]))[0])


def _triangle_grid():
    """(rho, s) grid on the triangle, sorted by (s, rho) so that argmax
    tie-breaking prefers smaller s, then smaller rho."""
    rhos = np.concatenate(([RHO_FLOOR, 1e-5], np.arange(1, 65) * GRID_STEP))
    pts = []
    for r in rhos:
        if r < GRID_STEP:
            ss = np.linspace(0.0, r, 9)
        else:
            ss = np.arange(0, math.floor(r / GRID_STEP) + 1) * GRID_STEP
            if ss[-1] < r:
                ss = np.append(ss, r)
        for sv in ss:
            pts.append((r, sv))
    pts.sort(key=lambda t: (t[1], t[0]))
    arr = np.array(pts)
    return arr[:, 0], arr[:, 1]


def _golden(f, lo: float, hi: float, maximize: bool, tol: float = PARAM_TOL):
    """Golden-section search on [lo, hi] for a unimodal objective."""
    if hi - lo <= tol:
        x = 0.5 * (lo + hi)
        return x, f(x)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    sign = 1.0 if maximize else -1.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = sign * f(c)
    fd = sign * f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = sign * f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _refine_triangle(f2, rho0: float, s0: float, maximize: bool = True):
    """Coordinate-wise golden-section refinement within 0 <= s <= rho <= 1."""
    rho, s = float(rho0), float(s0)
    best = f2(rho, s)
    for _ in range(60):
        s_new, _ = _golden(lambda t: f2(rho, t), 0.0, rho, maximize)
        rho_new, _ = _golden(lambda t: f2(t, s_new), max(s_new, RHO_FLOOR), 1.0, maximize)
        moved = max(abs(s_new - s), abs(rho_new - rho))
        rho, s = rho_new, s_new
        best = f2(rho, s)
        if moved < 10 * PARAM_TOL:
            break
    return rho, s, best


def e1(src, R: float, T: float) -> ExponentResult:
    """sup over the triangle of e0(rho, s) + rho R - s T.

    The raw supremum is reported (it is >= 0 automatically because the
    objective vanishes at rho = s = 0); no clamping is applied.
    """
    R = float(R)
    T = float(T)
    if R < 0:
        raise DomainError(f"R must be >= 0, got {R}")
    cond, py = _cond_and_marginal(src)
    rho_g, s_g = _triangle_grid()
    vals = _e0_batch(cond, py, rho_g, s_g) + rho_g * R - s_g * T
    k = int(np.argmax(vals))

    def obj(rho, s):
        return float(_e0_batch(cond, py, np.array([rho]), np.array([s]))[0]) + rho * R - s * T

    rho, s, val = _refine_triangle(obj, rho_g[k], s_g[k], maximize=True)
    if vals[k] > val:
        rho, s, val = rho_g[k], s_g[k], float(vals[k])
    trace = {
        "grid_value": float(vals[k]),
        "grid_argmax": {"rho": float(rho_g[k]), "s": float(s_g[k])},
        "refined_value": float(val),
    }
    return ExponentResult(value=float(val), argmax={"rho": rho, "s": s}, trace=trace)


def e2(src, R: float, T: float) -> ExponentResult:
    """e2 = e1 + T, with the same optimizing parameters."""
    res = e1(src, R, T)
    return ExponentResult(
        value=res.value + T, argmax=dict(res.argmax), diverged=res.diverged, trace=res.trace
    )


def r_min(src, T: float) -> float:
    """inf over the triangle (rho > 0) of (s T - e0(rho, s)) / rho.

    This is the rate threshold: e1(R, T) > 0 exactly when R exceeds it.
    Concave increasing in T; equals H(X|Y) at T = 0.
    """
    T = float(T)
    cond, py = _cond_and_marginal(src)

    def prof(rho):
        rho = max(rho, RHO_FLOOR)

        def g(s):
            return s * T - float(_e0_batch(cond, py, np.array([rho]), np.array([s]))[0])

        # Tolerance scaled to the slice width so tiny-rho slices resolve s/rho.
        _, gmin = _golden(g, 0.0, rho, maximize=False, tol=max(1e-13, rho * 1e-6))
        return gmin / rho

    rhos = np.concatenate(([RHO_FLOOR, 1e-5], np.arange(1, 65) * GRID_STEP))
    vals = np.array([prof(r) for r in rhos])
    k = int(np.argmin(vals))
    lo = rhos[max(k - 1, 0)]
    hi = rhos[min(k + 1, len(rhos) - 1)]
    rho_best, val = _golden(prof, lo, hi, maximize=False)
    if vals[k] < val:
        rho_best, val = rhos[k], float(vals[k])
    if rho_best <= 2e-6:
        # Boundary minimum: first-order Richardson extrapolation of the
        # rho -> 0 limit from the 1e-6 and 1e-5 evaluations.
        m6, m5 = prof(RHO_FLOOR), prof(1e-5)
        return (10.0 * m6 - m5) / 9.0
    return float(val)


def t_max(src, R: float) -> float:
    """sup over the triangle (s > 0) of (rho R + e0(rho, s)) / s.

    Inverse of r_min on the range where both are strictly increasing.
    """
    R = float(R)
    if R <= 0:
        raise DomainError(f"R must be > 0, got {R}")
    cond, py = _cond_and_marginal(src)
    s_floor = 1e-9

    def prof(rho):
        rho = max(rho, RHO_FLOOR)

        def g(s):
            num = float(_e0_batch(cond, py, np.array([rho]), np.array([s]))[0]) + rho * R
            return num / s

        _, gmax = _golden(g, s_floor, rho, maximize=True, tol=max(1e-13, rho * 1e-6))
        return gmax

    rhos = np.concatenate(([RHO_FLOOR, 1e-5], np.arange(1, 65) * GRID_STEP))
    vals = np.array([prof(r) for r in rhos])
    k = int(np.argmax(vals))
    lo = rhos[max(k - 1, 0)]
    hi = rhos[min(k + 1, len(rhos) - 1)]
    _, val = _golden(prof, lo, hi, maximize=True)
    return float(max(val, vals[k]))
