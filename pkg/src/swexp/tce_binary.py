"""Type-enumeration exponent for the binary symmetric pair, with its phase diagram.

The bin-occupancy moment analysis for correlated binary symmetric sources
reduces to a one-dimensional minimization over the normalized Hamming
distance delta::

    L(R, s, delta) = s delta ln((1-p)/p) + s [R - h(delta)] + (1-s) [R - h(delta)]_+
    L(R, s)        = min_{0 <= delta <= 1} L(R, s, delta)

The minimizer takes one of three closed forms depending on where (s, R)
falls in the strip s >= 0, 0 <= R <= ln 2.  The strip splits into seven
regions A..G, grouped into three main phases:

    C u F u G : typical bin occupancy dominates;  delta* = p
    B         : glassy phase;                     delta* = h^-1(R)
    A u D u E : small conditional type classes;   delta* = p_s

where p_s = p^s / (p^s + (1-p)^s) is the tilted crossover and, for s > 1,
R(s) = -ln(p^s + (1-p)^s) / (s - 1) separates the two competing local minima
at delta = p and delta = p_s.

The resulting erasure/list exponent is the supremum over all s >= 0 of

    E1'(R, T, s) = L(R, s) + s ln(1/(1-p)) - ln(p^(1-s) + (1-p)^(1-s)) - s T

which is concave in s and asymptotically affine; it diverges to +inf exactly
when its slope stays bounded away from zero (deep list regime).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .gallager_forney import ExponentResult, _golden
from .source_model import LN2, binary_entropy, binary_entropy_inverse

__all__ = [
    "PhasePoint",
    "REGIONS",
    "tilted_crossover",
    "boundary_rate",
    "l_objective",
    "l_closed_form",
    "classify_region",
    "phase_point",
    "e1_prime_branch",
    "e1_prime_binary",
    "e2_prime_binary",
    "very_noisy_bounds",
    "gamma_quadratic",
    "rho_star",
    "phase_grid",
    "write_phase_csv",
    "write_phase_plot_script",
]

REGIONS = ("A", "B", "C", "D", "E", "F", "G")

# Divergence detector for sup over s >= 0: probe the arithmetic tail
# s = 2, 4, ..., S_MAX and declare +inf when the last three per-unit
# increments exceed SLOPE_EPS and are non-decreasing (within fp noise).
S_MAX = 256
SLOPE_EPS = 1e-9


@dataclass(frozen=True)
class PhasePoint:
    """A point of the (s, R) strip with its region label and minimizer."""

    s: float
    R: float
    region: str
    delta_star: float
    L_value: float


def _check_p(p: float) -> float:
    p = float(p)
    if not (0.0 < p <= 0.5):
        raise DomainError(f"p must be in (0, 1/2], got {p}")
    return p


def _check_R(R: float) -> float:
    R = float(R)
    if not (-1e-12 <= R <= LN2 + 1e-12):
        raise DomainError(f"R must be in [0, ln 2], got {R}")
    return min(max(R, 0.0), LN2)


def tilted_crossover(p: float, s: float) -> float:
    """p_s = p^s / (p^s + (1-p)^s); equals 1/2 at s=0, p at s=1, decreasing in s."""
    p = _check_p(p)
    s = float(s)
    # log-space to stay finite for large s
    a = s * math.log(p)
    b = s * math.log1p(-p)
    m = max(a, b)
    return math.exp(a - m) / (math.exp(a - m) + math.exp(b - m))


def boundary_rate(p: float, s: float) -> float:
    """R(s) = -ln(p^s + (1-p)^s) / (s - 1) for s > 1.

    Separates the delta* = p and delta* = p_s sub-phases; decreases from
    h(p) at s -> 1+ to ln(1/(1-p)) as s -> inf.
    """
    p = _check_p(p)
    s = float(s)
    if s <= 1.0:
        raise DomainError(f"boundary_rate requires s > 1, got {s}")
    return -np.logaddexp(s * math.log(p), s * math.log1p(-p)) / (s - 1.0)


def l_objective(p: float, R: float, s: float, delta: float) -> float:
    """L(R, s, delta) = s delta ln((1-p)/p) + s [R - h(delta)] + (1-s) [R - h(delta)]_+."""
    p = _check_p(p)
    R = _check_R(R)
    s = float(s)
    delta = float(delta)
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    if not (0.0 <= delta <= 1.0):
        raise DomainError(f"delta must be in [0, 1], got {delta}")
    gap = R - binary_entropy(delta)
    return s * delta * math.log((1 - p) / p) + s * gap + (1 - s) * max(gap, 0.0)


def classify_region(p: float, R: float, s: float) -> str:
    """Region label A..G of the point (s, R).

    Boundary points are assigned per the closures of the defining
    inequalities: C and B are closed above (R <= h(p), R <= h(p_s)), and for
    s > 1, G, F, E are closed above (R <= h(p_s), R <= R(s), R <= h(p)).
    The strip s <= 1 keeps the A/B/C labels, s > 1 the D/E/F/G labels.
    """
    p = _check_p(p)
    R = _check_R(R)
    s = float(s)
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    hp = binary_entropy(p)
    hps = binary_entropy(tilted_crossover(p, s))
    if s <= 1.0:
        if R <= hp:
            return "C"
        if R <= hps:
            return "B"
        return "A"
    rs = boundary_rate(p, s)
    if R <= hps:
        return "G"
    if R <= rs:
        return "F"
    if R <= hp:
        return "E"
    return "D"


def l_closed_form(p: float, R: float, s: float):
    """Closed-form (L(R, s), region, delta_star).

    C u F u G : L = s [p ln((1-p)/p) + R - h(p)],       delta* = p
    B         : L = s h^-1(R) ln((1-p)/p),              delta* = h^-1(R)
    A u D u E : L = s p_s ln((1-p)/p) + R - h(p_s),     delta* = p_s
    """
    p = _check_p(p)
    R = _check_R(R)
    region = classify_region(p, R, s)
    lr = math.log((1 - p) / p)
    if region in ("C", "F", "G"):
        delta = p
        val = s * (p * lr + R - binary_entropy(p))
    elif region == "B":
        delta = binary_entropy_inverse(R)
        val = s * delta * lr
    else:
        delta = tilted_crossover(p, s)
        val = s * delta * lr + R - binary_entropy(delta)
    return float(val), region, float(delta)


def phase_point(p: float, R: float, s: float) -> PhasePoint:
    val, region, delta = l_closed_form(p, R, s)
    return PhasePoint(s=float(s), R=float(R), region=region, delta_star=delta, L_value=val)


def _log_mix(p: float, t: float) -> float:
    """ln(p^t + (1-p)^t), stable for any real t."""
    return float(np.logaddexp(t * math.log(p), t * math.log1p(-p)))


def e1_prime_branch(p: float, R: float, T: float, s: float) -> float:
    """E1'(R, T, s): the fixed-s exponent, in its three-case form.

    C u F u G : s (R - T)                        - ln(p^(1-s) + (1-p)^(1-s))
    B         : s [R - T + D(h^-1(R) || p)]      - ln(p^(1-s) + (1-p)^(1-s))
    A u D u E : R - s T - ln(p^s + (1-p)^s)      - ln(p^(1-s) + (1-p)^(1-s))
    """
    p = _check_p(p)
    R = _check_R(R)
    s = float(s)
    if s < 0:
        raise DomainError(f"s must be >= 0, got {s}")
    region = classify_region(p, R, s)
    tail = _log_mix(p, 1.0 - s)
    if region in ("C", "F", "G"):
        return s * (R - T) - tail
    if region == "B":
        d = binary_entropy_inverse(R)
        div = d * math.log(d / p) + (1 - d) * math.log((1 - d) / (1 - p)) if d > 0 else -math.log(p)
        return s * (R - T + div) - tail
    return R - s * T - _log_mix(p, s) - tail


def _sup_over_s(branch, trace_label: str) -> ExponentResult:
    """sup over s >= 0 of a concave, asymptotically affine objective.

    Dense grid on [0, 2], arithmetic tail {2, 4, ..., S_MAX} for divergence
    detection, then golden-section refinement around the best grid point.
    """
    s_head = np.arange(0, 129) / 64.0
    s_tail = np.arange(2, S_MAX + 1, 2, dtype=float)
    tail_vals = np.array([branch(s) for s in s_tail])
    incr = np.diff(tail_vals) / np.diff(s_tail)
    last = incr[-3:]
    if np.all(last > SLOPE_EPS) and np.all(np.diff(last) >= -1e-12):
        return ExponentResult(
            value=math.inf,
            argmax={"s": float(s_tail[-1])},
            diverged=True,
            trace={"label": trace_label, "tail_increments": [float(v) for v in last]},
        )
    head_vals = np.array([branch(s) for s in s_head])
    all_s = np.concatenate([s_head, s_tail])
    all_v = np.concatenate([head_vals, tail_vals])
    k = int(np.argmax(all_v))
    lo = all_s[max(k - 1, 0)]
    hi = all_s[min(k + 1, len(all_s) - 1)]
    s_best, val = _golden(branch, float(lo), float(hi), maximize=True, tol=1e-10)
    if all_v[k] > val:
        s_best, val = float(all_s[k]), float(all_v[k])
    return ExponentResult(
        value=float(val),
        argmax={"s": float(s_best)},
        trace={"label": trace_label, "grid_value": float(all_v[k]), "grid_s": float(all_s[k])},
    )


def e1_prime_binary(p: float, R: float, T: float) -> ExponentResult:
    """sup over s >= 0 of E1'(R, T, s); +inf in the deep list regime."""
    p = _check_p(p)
    R = _check_R(R)
    T = float(T)
    return _sup_over_s(lambda s: e1_prime_branch(p, R, T, s), "e1_prime_binary")


def e2_prime_binary(p: float, R: float, T: float) -> ExponentResult:
    """E2' = E1' + T.

    The additive relation between the two exponents is established for the
    pair of Section-3-style bounds; applying it to the type-enumeration
    exponent is an extrapolation kept out of the acceptance suite.
    """
    res = e1_prime_binary(p, R, T)
    return ExponentResult(
        value=res.value + T if not res.diverged else math.inf,
        argmax=dict(res.argmax),
        diverged=res.diverged,
        trace=res.trace,
    )


def gamma_quadratic(t: float, eps: float) -> float:
    """Second-order expansion (t-1)(ln 2 - 2 t eps^2) of -ln((1/2-eps)^t + (1/2+eps)^t)."""
    return (t - 1.0) * (LN2 - 2.0 * t * eps * eps)


def rho_star(s: float, theta: float) -> float:
    """Unconstrained maximizer rho = s/theta of the weak-correlation objective."""
    if theta <= 0:
        raise DomainError(f"theta must be > 0, got {theta}")
    return s / theta


def very_noisy_bounds(eps: float, tau: float, theta: float):
    """Closed-form weak-correlation bounds for p = 1/2 - eps, T = -tau eps^2.

    Returns (e1_upper, e1_prime_lower)::

        e1_upper       = (tau + 2) eps^2
        e1_prime_lower = [tau (tau + 8) / 16 - 1] eps^2

    Valid for rates ln 2 - 2 eps^2 <= R <= ln 2 (parametrized by theta in
    [0, 1] via R = ln 2 - 2 theta^2 eps^2) and tau > 4.  The first bound is
    affine in tau while the second is quadratic, so their ratio grows
    without limit.
    """
    eps = float(eps)
    tau = float(tau)
    theta = float(theta)
    if not (0.0 < eps <= 0.05):
        raise DomainError(f"eps must be in (0, 0.05], got {eps}")
    if tau <= 4.0:
        raise DomainError(f"tau must be > 4, got {tau}")
    if not (0.0 <= theta <= 1.0):
        raise DomainError(f"theta must be in [0, 1], got {theta}")
    e1_upper = (tau + 2.0) * eps * eps
    e1p_lower = (tau * (tau + 8.0) / 16.0 - 1.0) * eps * eps
    return e1_upper, e1p_lower


def phase_grid(p: float, s_values, R_values):
    """PhasePoint for every (s, R) pair of the given grids, row-major in s."""
    return [phase_point(p, R, s) for s in s_values for R in R_values]


def write_phase_csv(points, path, p: float):
    """Phase-diagram rows ``s,R,region,delta_star,L`` (schema swexp.phase.v1)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# schema=swexp.phase.v1 p={p!r}\n")
        fh.write("s,R,region,delta_star,L\n")
        for pt in points:
            fh.write(f"{pt.s!r},{pt.R!r},{pt.region},{pt.delta_star!r},{pt.L_value!r}\n")


def write_phase_plot_script(path, p: float, boundaries_csv: str, output_png: str = "phase.png"):
    """Emit a gnuplot script drawing the phase boundaries.

    Solid lines separate the three main phases (h(p) for s <= 1, h(p_s) for
    s <= 1, R(s) for s > 1); dashed lines are the sub-phase splits inside a
    main phase (h(p) for s > 1, h(p_s) for s > 1).
    """
    script = f"""\
# gnuplot script: phase diagram of L(R, s), p = {p}
# data: {boundaries_csv} with columns s, h_p, h_ps, R_s (R_s empty for s <= 1)
set terminal pngcairo size 900,600
set output '{output_png}'
set xlabel 's'
set ylabel 'R (nats)'
set yrange [0:{LN2:.6f}]
set key outside
set datafile separator ','
plot \\
  '{boundaries_csv}' using ($1<=1?$1:1/0):2 with lines lw 2 lc rgb 'black' dashtype 1 title 'h(p): C|B', \\
  '{boundaries_csv}' using ($1<=1?$1:1/0):3 with lines lw 2 lc rgb 'blue'  dashtype 1 title 'h(p_s): B|A', \\
  '{boundaries_csv}' using ($1>1?$1:1/0):4  with lines lw 2 lc rgb 'red'   dashtype 1 title 'R(s): F|E', \\
  '{boundaries_csv}' using ($1>1?$1:1/0):2  with lines lw 1 lc rgb 'black' dashtype 2 title 'h(p): D|E', \\
  '{boundaries_csv}' using ($1>1?$1:1/0):3  with lines lw 1 lc rgb 'blue'  dashtype 2 title 'h(p_s): F|G'
"""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(script)


def write_phase_boundaries_csv(path, p: float, s_values):
    """Boundary curves h(p), h(p_s), R(s) sampled on an s grid."""
    hp = binary_entropy(p)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# schema=swexp.phase-boundaries.v1 p={p!r}\n")
        fh.write("s,h_p,h_ps,R_s\n")
        for s in s_values:
            hps = binary_entropy(tilted_crossover(p, s))
            rs = boundary_rate(p, s) if s > 1 else ""
            rs_txt = repr(float(rs)) if rs != "" else ""
            fh.write(f"{float(s)!r},{hp!r},{hps!r},{rs_txt}\n")


__all__.append("write_phase_boundaries_csv")
