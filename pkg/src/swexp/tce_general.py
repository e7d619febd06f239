"""Type-enumeration exponent for general finite-alphabet memoryless pairs.

Three nested optimizations::

    E1'(R, T)    = sup_{s >= 0} E1'(R, T, s)
    E1'(R, T, s) = min_{P_Y'} [ D(P_Y' || P_Y) + L(P_Y', R, s)
                                - sum_y P_Y'(y) ln sum_x P(x|y)^(1-s) ] - s T
    L(P_Y', R, s) = min_{P_X'|Y} ( s [ D(P_X'|Y || P_X|Y | P_Y') + R ]
                                   + (1-s) [ R - H(X'|Y) ]_+ )

where H(X'|Y) and the conditional divergence are taken under P_Y' x P_X'|Y.

Inner minimum.  Splitting on whether the positive part is active, both
pieces are convex in the conditional and their stationary points lie on the
per-y tilted family  P_u(x|y) ~ P(x|y)^u  (shared exponent u across all y):

  * H(X'|Y) >= R:  minimize the divergence alone; the solution is P_X|Y
    itself when sum_y P_Y'(y) H(X|Y=y) >= R, else the boundary member with
    conditional entropy exactly R (u solved by bisection on [0, 1]).
  * H(X'|Y) <= R:  the unconstrained stationary point is u = s; if its
    entropy exceeds R the minimum moves to the same entropy-R boundary.

The smallest candidate is exact; it is validated against dense
conditional-simplex grids in the tests.  At s = 0 the divergence term
carries no weight and the minimum is [R - ln|X|]_+ (uniform conditional).
The boundary exponent u_R does not depend on s, so one bisection per
Y-marginal serves every s probed by the outer supremum.

Middle minimum.  The objective mixes convex and concave pieces in P_Y', so
a full simplex grid (1/64 per coordinate for |Y| <= 3, 1/32 for |Y| in
{4,5,6}) precedes a Nelder-Mead polish of the best grid point.  Alphabets
are capped at |X|, |Y| <= 6.

Outer supremum.  Same concave-tail divergence detector as the binary
module.  Sums of the form sum_x P(x|y)^(1-s) are restricted to the support
of P(.|y), matching the exponential-order derivation (zero-probability
sequences never contribute); type-class polynomial factors are dropped
throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

from .errors import DomainError
from .gallager_forney import ExponentResult, _golden
from .source_model import (
    as_joint_source,
    conditional_x_given_y,
    marginal_y,
    validate_distribution,
)
from .tce_binary import S_MAX, SLOPE_EPS

__all__ = ["InnerExponent", "inner_l", "e1_prime_general", "e1_prime_general_at_s"]

MAX_ALPHABET = 6


@dataclass
class InnerExponent:
    """Value of the inner minimization with its minimizing conditional.

    ``conditional[y, x]`` is the minimizer P_X'|Y; ``value`` equals the
    objective evaluated there.
    """

    value: float
    conditional: np.ndarray


def _lse(a: np.ndarray, axis: int) -> np.ndarray:
    """Log-sum-exp along an axis, tolerant of -inf entries."""
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    out = np.log(np.sum(np.exp(a - m), axis=axis)) + np.squeeze(m, axis=axis)
    return out


class _Ctx:
    """Per-source arrays shared by the nested optimizations."""

    def __init__(self, src):
        src = as_joint_source(src)
        if src.nx > MAX_ALPHABET or src.ny > MAX_ALPHABET:
            raise DomainError(
                f"alphabets capped at {MAX_ALPHABET}, got |X|={src.nx}, |Y|={src.ny}"
            )
        self.src = src
        self.py = marginal_y(src)
        cond = conditional_x_given_y(src)  # (|X|, |Y|)
        self.cond_yx = cond.T.copy()  # (|Y|, |X|), rows are P(.|y)
        with np.errstate(divide="ignore"):
            self.ln_yx = np.where(
                self.cond_yx > 0, np.log(np.where(self.cond_yx > 0, self.cond_yx, 1.0)), -np.inf
            )
        self.supp = self.cond_yx > 0
        self.ln_supp_size = np.log(self.supp.sum(axis=1).astype(float))
        self.H1 = self.tilt_stats(np.array([1.0]))[0][0]
        # Tabulated tilted family on u in [0, 1] for the entropy-R boundary:
        # per-y entropy is strictly decreasing in u, so the crossing with R
        # can be found by a vectorized search + linear interpolation.
        self.u_grid = np.linspace(0.0, 1.0, 4097)
        self.H_tab, self.D_tab = self.tilt_stats(self.u_grid)

    def tilt_stats(self, u: np.ndarray):
        """Per-y entropy and divergence of tilted members, for a vector of
        exponents: both outputs have shape (len(u), |Y|)."""
        u = np.asarray(u, dtype=float)
        w = np.where(self.supp[None, :, :], u[:, None, None] * self.ln_yx[None, :, :], -np.inf)
        m = _lse(w, axis=2)
        q = np.exp(w - m[:, :, None])
        ebar = np.where(self.supp[None, :, :], q * self.ln_yx[None, :, :], 0.0).sum(axis=2)
        H = m - u[:, None] * ebar
        D = (u[:, None] - 1.0) * ebar - m
        return H, D

    def tilt_conditional(self, u: float) -> np.ndarray:
        w = np.where(self.supp, u * self.ln_yx, -np.inf)
        m = _lse(w, axis=1)
        return np.exp(w - m[:, None])

    def tail_terms(self, s: np.ndarray) -> np.ndarray:
        """c_s(y) = ln sum_{x in supp} P(x|y)^(1-s); shape (len(s), |Y|)."""
        s = np.asarray(s, dtype=float)
        w = np.where(
            self.supp[None, :, :], (1.0 - s)[:, None, None] * self.ln_yx[None, :, :], -np.inf
        )
        return _lse(w, axis=2)

    def boundary_exponent(self, W: np.ndarray, R: float):
        """Per-row tilt exponent u_R with sum_y W_y H_y(u_R) = R, where defined.

        Returns (u_r, d_r): d_r is the weighted divergence at u_R and +inf on
        rows where the interior candidates already cover the minimum
        (h_P >= R) or no boundary member exists (R > max support entropy).
        Solved from the tabulated family by a monotone search plus linear
        interpolation of the (entropy, divergence) pair.
        """
        h_p = W @ self.H1
        h0 = W @ self.ln_supp_size
        need = (h_p < R) & (R <= h0 + 1e-15)
        u_r = np.full(W.shape[0], np.nan)
        d_r = np.full(W.shape[0], np.inf)
        if np.any(need):
            idx = np.where(need)[0]
            Wn = W[idx]
            hW = self.H_tab @ Wn.T  # (U, n), each column decreasing in u
            dW = self.D_tab @ Wn.T
            i = np.argmax(hW <= R, axis=0)
            i = np.maximum(i, 1)
            cols = np.arange(len(idx))
            h_hi, h_lo = hW[i - 1, cols], hW[i, cols]
            t = np.where(h_hi > h_lo, (h_hi - R) / np.where(h_hi > h_lo, h_hi - h_lo, 1.0), 0.0)
            u_r[idx] = self.u_grid[i - 1] + t * (self.u_grid[i] - self.u_grid[i - 1])
            d_r[idx] = dW[i - 1, cols] + t * (dW[i, cols] - dW[i - 1, cols])
        return u_r, d_r

    def boundary_exponent_exact(self, w: np.ndarray, R: float):
        """Bisection-refined boundary exponent for a single Y-marginal."""
        h_p = float(w @ self.H1)
        h0 = float(w @ self.ln_supp_size)
        if not (h_p < R <= h0 + 1e-15):
            return math.nan, math.inf
        lo, hi = 0.0, 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if float(w @ self.tilt_stats(np.array([mid]))[0][0]) > R:
                lo = mid
            else:
                hi = mid
        u = 0.5 * (lo + hi)
        return u, float(w @ self.tilt_stats(np.array([u]))[1][0])


class _MiddleProblem:
    """Middle minimization over P_Y' at fixed (source, R).

    Precomputes everything that does not depend on s: the divergence term
    of the objective, the mean source conditional entropy, and the
    entropy-R boundary divergences for the whole W batch (these are the
    expensive part and are shared by every s probed afterwards).
    """

    def __init__(self, ctx: _Ctx, W: np.ndarray, R: float):
        self.ctx = ctx
        self.W = W
        self.R = R
        self.h_p = W @ ctx.H1
        _, self.d_r = ctx.boundary_exponent(W, R)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(W > 0, W / ctx.py[None, :], 1.0)
            self.kl = np.where(W > 0, W * np.log(ratio), 0.0).sum(axis=1)

    def scan(self, s_arr: np.ndarray):
        """Middle minimum for every s in s_arr; returns (values, argmin rows)."""
        ctx, W, R = self.ctx, self.W, self.R
        s_arr = np.asarray(s_arr, dtype=float)
        pos = s_arr > 0
        mid = np.empty((len(s_arr), W.shape[0]))
        tails = ctx.tail_terms(s_arr)  # (S, |Y|)
        if np.any(pos):
            s_pos = s_arr[pos]
            Hs, Ds = ctx.tilt_stats(s_pos)  # (Sp, |Y|)
            hs_w = Hs @ W.T  # (Sp, N)
            ds_w = Ds @ W.T
            sp = s_pos[:, None]
            piece1 = np.where(self.h_p[None, :] >= R, sp * R, np.inf)
            piece2 = np.where(hs_w <= R, sp * (ds_w + R) + (1.0 - sp) * (R - hs_w), np.inf)
            bound = np.where(
                np.isfinite(self.d_r)[None, :], sp * (self.d_r[None, :] + R), np.inf
            )
            inner = np.minimum(np.minimum(piece1, piece2), bound)
            mid[pos] = self.kl[None, :] + inner - tails[pos] @ W.T
        if np.any(~pos):
            inner0 = max(R - math.log(ctx.src.nx), 0.0)
            mid[~pos] = self.kl[None, :] + inner0 - tails[~pos] @ W.T
        arg = np.argmin(mid, axis=1)
        return mid[np.arange(len(s_arr)), arg], arg


def _middle_min_scan(ctx: _Ctx, W: np.ndarray, R: float, s_arr: np.ndarray):
    """Grid middle minimum for every s in s_arr at once."""
    return _MiddleProblem(ctx, W, R).scan(s_arr)


def inner_l(src, py_prime, R: float, s: float) -> InnerExponent:
    """Exact inner minimum over conditionals, with the minimizer."""
    R = float(R)
    s = float(s)
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    ctx = src if isinstance(src, _Ctx) else _Ctx(src)
    w = validate_distribution(py_prime, name="py_prime")
    if w.shape != (ctx.src.ny,):
        raise DomainError(f"py_prime must have length {ctx.src.ny}")
    if s == 0.0:
        val = max(R - math.log(ctx.src.nx), 0.0)
        uniform = np.full_like(ctx.cond_yx, 1.0 / ctx.src.nx)
        return InnerExponent(value=val, conditional=uniform)

    candidates = []
    h_p = float(w @ ctx.H1)
    if h_p >= R:
        candidates.append((s * R, 1.0))
    Hs, Ds = ctx.tilt_stats(np.array([s]))
    hs_w = float(w @ Hs[0])
    if hs_w <= R:
        v = s * (float(w @ Ds[0]) + R) + (1.0 - s) * (R - hs_w)
        candidates.append((v, s))
    u_r, d_r = ctx.boundary_exponent_exact(w, R)
    if np.isfinite(d_r):
        candidates.append((s * (d_r + R), u_r))
    if not candidates:
        raise DomainError(
            f"no conditional with finite divergence reaches rate {R}; "
            f"max support entropy is {float(w @ ctx.ln_supp_size)}"
        )
    val, u_best = min(candidates, key=lambda t: t[0])
    return InnerExponent(value=float(val), conditional=ctx.tilt_conditional(u_best))


@lru_cache(maxsize=32)
def _simplex_grid(dim: int, k: int) -> np.ndarray:
    """All compositions of k into dim parts, normalized; shape (C, dim)."""

    def comps(total, parts):
        if parts == 1:
            yield (total,)
            return
        for head in range(total + 1):
            for rest in comps(total - head, parts - 1):
                yield (head,) + rest

    return np.array(list(comps(k, dim)), dtype=float) / k


def _default_resolution(ny: int) -> int:
    return 64 if ny <= 3 else 32


def _polished_min(ctx: _Ctx, problem: _MiddleProblem, s: float,
                  w_start: np.ndarray | None = None, polish: bool = True):
    """Grid middle minimum at s, improved by a Nelder-Mead polish.

    Returns (value, w); the polish uses a softmax parametrization seeded
    from the best grid row (or ``w_start`` when better) so the result can
    only move below the grid value.
    """
    R = problem.R
    vals, args = problem.scan(np.array([s]))
    w_best, v_best = problem.W[args[0]].copy(), float(vals[0])
    if w_start is not None:
        v_alt = float(_middle_min_scan(ctx, np.asarray(w_start)[None, :], R, np.array([s]))[0][0])
        if v_alt < v_best:
            w_best, v_best = np.asarray(w_start, dtype=float).copy(), v_alt
    if not polish or ctx.src.ny == 1:
        return v_best, w_best
    if ctx.src.ny == 2:
        # one free coordinate: golden-section inside the bracketing grid cell
        step = 1.0 / (problem.W.shape[0] - 1)

        def f1(w0):
            w = np.array([w0, 1.0 - w0])
            return float(_middle_min_scan(ctx, w[None, :], R, np.array([s]))[0][0])

        w0, v = _golden(
            f1,
            max(w_best[0] - step, 0.0),
            min(w_best[0] + step, 1.0),
            maximize=False,
            tol=1e-7,
        )
        if v < v_best:
            w_best, v_best = np.array([w0, 1.0 - w0]), float(v)
        return v_best, w_best
    z0 = np.log(w_best + 1e-9)

    def f(z):
        e = np.exp(z - z.max())
        w = e / e.sum()
        return float(_middle_min_scan(ctx, w[None, :], R, np.array([s]))[0][0])

    res = minimize(f, z0, method="Nelder-Mead",
                   options={"xatol": 1e-7, "fatol": 1e-12, "maxiter": 300})
    if res.fun < v_best:
        e = np.exp(res.x - res.x.max())
        w_best, v_best = e / e.sum(), float(res.fun)
    return v_best, w_best


def e1_prime_general_at_s(src, R: float, s: float, *, resolution: int | None = None,
                          polish: bool = True, w_start: np.ndarray | None = None):
    """Middle minimization at fixed s.

    Returns (value, py_prime, conditional); ``value`` excludes the -sT term.
    Simplex grid scan, then an optional Nelder-Mead polish (softmax
    parametrization, xatol 1e-7) seeded from the best grid point or from
    ``w_start`` when that is better.
    """
    ctx = src if isinstance(src, _Ctx) else _Ctx(src)
    R = float(R)
    s = float(s)
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    k = resolution or _default_resolution(ctx.src.ny)
    problem = _MiddleProblem(ctx, _simplex_grid(ctx.src.ny, k), R)
    v_best, w_best = _polished_min(ctx, problem, s, w_start=w_start, polish=polish)
    conditional = inner_l(ctx, w_best, R, s).conditional
    return v_best, w_best, conditional


def e1_prime_general(src, R: float, T: float, *, resolution: int | None = None) -> ExponentResult:
    """sup over s >= 0 of the general type-enumeration exponent.

    Divergence handling matches the binary module: the arithmetic tail
    s = 2, 4, ..., 256 is probed and +inf declared when the last three
    per-unit increments exceed 1e-9 without decreasing.  The s scan runs on
    the grid middle minimum; the winning neighborhood is then re-evaluated
    with the Nelder-Mead polish so the reported value never exceeds the
    true supremum.
    """
    ctx = _Ctx(src)
    R = float(R)
    T = float(T)
    if not (0.0 <= R <= math.log(ctx.src.nx) + 1e-12):
        raise DomainError(f"R must be in [0, ln|X|], got {R}")
    k = resolution or _default_resolution(ctx.src.ny)
    problem = _MiddleProblem(ctx, _simplex_grid(ctx.src.ny, k), R)

    s_head = np.arange(0, 129) / 64.0
    s_tail = np.arange(2, S_MAX + 1, 2, dtype=float)
    s_all = np.concatenate([s_head, s_tail])
    mins, _ = problem.scan(s_all)
    vals = mins - s_all * T

    tail_vals = vals[len(s_head):]
    incr = np.diff(tail_vals) / np.diff(s_tail)
    last = incr[-3:]
    if np.all(last > SLOPE_EPS) and np.all(np.diff(last) >= -1e-12):
        return ExponentResult(
            value=math.inf,
            argmax={"s": float(s_tail[-1])},
            diverged=True,
            trace={"label": "e1_prime_general", "tail_increments": [float(v) for v in last]},
        )

    kbest = int(np.argmax(vals))
    lo = float(s_all[max(kbest - 1, 0)])
    hi = float(s_all[min(kbest + 1, len(s_all) - 1)])

    def branch_grid(s):
        return float(problem.scan(np.array([s]))[0][0]) - s * T

    s0, _ = _golden(branch_grid, lo, hi, maximize=True, tol=1e-8)

    # Polished pass around the grid-located supremum; the polish can only
    # lower each middle minimum, so the max over probed s stays a valid
    # (never over-reported) value of the supremum.
    state = {"w": None, "best": (-math.inf, None, None)}

    def branch_polished(s):
        v, w = _polished_min(ctx, problem, s, w_start=state["w"])
        state["w"] = w
        total = v - s * T
        if total > state["best"][0]:
            state["best"] = (total, s, w)
        return total

    step = 1.0 / 64.0
    # Endpoints and the grid argmax must be probed explicitly: the supremum
    # can sit exactly at s = 0 where a golden window would never land.
    for probe in {float(s_all[kbest]), s0, max(s0 - step, 0.0), s0 + step}:
        branch_polished(probe)
    _golden(branch_polished, max(s0 - step, 0.0), s0 + step, maximize=True, tol=1e-4)
    best_val, best_s, best_w = state["best"]
    best_cond = inner_l(ctx, best_w, R, best_s).conditional
    return ExponentResult(
        value=float(best_val),
        argmax={"s": float(best_s), "py_prime": np.asarray(best_w).tolist()},
        trace={
            "label": "e1_prime_general",
            "grid_value": float(vals[kbest]),
            "grid_s": float(s_all[kbest]),
            "conditional": np.asarray(best_cond).tolist(),
        },
    )
