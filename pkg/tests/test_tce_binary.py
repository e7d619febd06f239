import math

import numpy as np
import pytest

from swexp.errors import DomainError
from swexp.gallager_forney import e1 as gf_e1
from swexp.source_model import LN2, BinarySymmetricPair, binary_entropy, binary_entropy_inverse
from swexp.tce_binary import (
    boundary_rate,
    classify_region,
    e1_prime_binary,
    e1_prime_branch,
    e2_prime_binary,
    gamma_quadratic,
    l_closed_form,
    l_objective,
    phase_point,
    tilted_crossover,
    very_noisy_bounds,
)


def brute_min_l(p, R, s, step=1e-4):
    """Independent oracle: dense delta grid, then golden refinement of the
    winning cell (the objective is piecewise smooth with one kink)."""
    ds = np.arange(0.0, 1.0 + step, step)
    ds = np.clip(ds, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(ds > 0, ds * np.log(np.where(ds > 0, ds, 1.0)), 0.0) - np.where(
            ds < 1, (1 - ds) * np.log(np.where(ds < 1, 1 - ds, 1.0)), 0.0
        )
    gap = R - h
    vals = s * ds * math.log((1 - p) / p) + s * gap + (1 - s) * np.maximum(gap, 0.0)
    k = int(np.argmin(vals))
    lo = max(ds[max(k - 1, 0)], 0.0)
    hi = min(ds[min(k + 1, len(ds) - 1)], 1.0)
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = l_objective(p, R, s, c)
    fd = l_objective(p, R, s, d)
    while b - a > 1e-12:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = l_objective(p, R, s, c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = l_objective(p, R, s, d)
    return min(float(vals[k]), l_objective(p, R, s, 0.5 * (a + b)))


class TestLObjective:
    def test_bracket_terms_vanish_at_h_inverse(self):
        p, R, s = 0.1, 0.4, 1.7
        d = binary_entropy_inverse(R)
        expect = s * d * math.log((1 - p) / p)
        assert abs(l_objective(p, R, s, d) - expect) < 1e-9

    def test_s_zero(self):
        for delta in (0.05, 0.3, 0.5):
            gap = 0.4 - binary_entropy(delta)
            assert l_objective(0.1, 0.4, 0.0, delta) == pytest.approx(max(gap, 0.0))

    def test_direct_evaluation(self):
        p, R, s, d = 0.1, 0.5, 2.0, 0.2
        expect = (
            s * d * math.log(9)
            + s * (R - binary_entropy(d))
            + (1 - s) * max(R - binary_entropy(d), 0.0)
        )
        assert abs(l_objective(p, R, s, d) - expect) < 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            l_objective(0.1, 0.5, -0.1, 0.2)
        with pytest.raises(DomainError):
            l_objective(0.1, 0.5, 1.0, 1.2)
        with pytest.raises(DomainError):
            l_objective(0.7, 0.5, 1.0, 0.2)


class TestClosedForm:
    def test_degenerate_p_half(self):
        assert l_closed_form(0.5, LN2, 0.7)[0] == pytest.approx(0.0, abs=1e-12)
        assert l_closed_form(0.5, LN2, 3.0)[0] == pytest.approx(0.0, abs=1e-12)

    def test_boundary_rate_p_half(self):
        for s in (1.5, 2.0, 4.0):
            assert boundary_rate(0.5, s) == pytest.approx(LN2)

    @pytest.mark.parametrize("p", [0.05, 0.1, 0.25])
    def test_grid_oracle(self, p):
        for s in np.linspace(0.0, 4.0, 17):
            for R in np.linspace(0.0, LN2, 15):
                cf = l_closed_form(p, R, s)[0]
                assert abs(cf - brute_min_l(p, R, s)) < 1e-6, (p, R, s)

    def test_minimizer_reported(self):
        for p, R, s in ((0.1, 0.2, 0.5), (0.1, 0.5, 0.5), (0.1, 0.66, 0.5), (0.1, 0.25, 2.5)):
            val, region, dstar = l_closed_form(p, R, s)
            assert val == pytest.approx(l_objective(p, R, s, dstar), abs=1e-10)


class TestRegions:
    def test_endpoint_A(self):
        assert classify_region(0.1, LN2, 0.5) == "A"

    def test_C_below_hp(self):
        for s in (0.0, 0.5, 1.0):
            assert classify_region(0.1, 0.2, s) == "C"

    def test_boundary_ordering_s2(self):
        p, s = 0.1, 2.0
        hps = binary_entropy(tilted_crossover(p, s))
        rs = boundary_rate(p, s)
        hp = binary_entropy(p)
        assert hps < rs < hp
        assert classify_region(p, hps / 2, s) == "G"
        assert classify_region(p, (hps + rs) / 2, s) == "F"
        assert classify_region(p, (rs + hp) / 2, s) == "E"
        assert classify_region(p, (hp + LN2) / 2, s) == "D"

    def test_every_point_gets_exactly_one_label(self):
        for s in np.linspace(0, 4, 33):
            for R in np.linspace(0, LN2, 23):
                assert classify_region(0.1, R, s) in "ABCDEFG"

    def test_continuity_across_boundaries(self):
        p = 0.1
        eps = 1e-12
        rng = np.random.default_rng(2)
        for _ in range(200):
            s = rng.uniform(0.0, 4.0)
            curves = [binary_entropy(p), binary_entropy(tilted_crossover(p, s))]
            if s > 1:
                curves.append(boundary_rate(p, s))
            for R in curves:
                if not (eps < R < LN2 - eps):
                    continue
                below = l_closed_form(p, R - eps, s)[0]
                above = l_closed_form(p, R + eps, s)[0]
                assert abs(above - below) <= 1e-9

    def test_local_minimum_structure_in_E_and_F(self):
        # in the two-minimum strip the delta-derivative changes sign at both
        # delta = p and delta = p_s, and the label picks the smaller minimum
        p = 0.1
        h = 1e-6
        for s, R in ((1.8, 0.25), (2.5, 0.12), (3.0, 0.3)):
            region = classify_region(p, R, s)
            if region not in ("E", "F"):
                continue
            ps = tilted_crossover(p, s)
            for d0 in (p, ps):
                left = (l_objective(p, R, s, d0) - l_objective(p, R, s, d0 - h)) / h
                right = (l_objective(p, R, s, d0 + h) - l_objective(p, R, s, d0)) / h
                assert left < 0 < right, (s, R, d0)
            vp = l_objective(p, R, s, p)
            vps = l_objective(p, R, s, ps)
            _, _, dstar = l_closed_form(p, R, s)
            assert dstar == pytest.approx(p if vp <= vps else ps)


class TestTiltedCrossover:
    def test_endpoints(self):
        assert tilted_crossover(0.1, 0.0) == pytest.approx(0.5)
        assert tilted_crossover(0.1, 1.0) == pytest.approx(0.1)

    def test_monotone_decreasing(self):
        svals = np.linspace(0.0, 8.0, 30)
        ps = [tilted_crossover(0.2, s) for s in svals]
        assert all(b < a + 1e-15 for a, b in zip(ps, ps[1:]))
        assert all(0.0 < v < 1.0 for v in ps)


class TestE1Prime:
    def test_divergent_regime(self):
        res = e1_prime_binary(0.1, 0.5, math.log(1 / 9) - 0.1)
        assert res.diverged and math.isinf(res.value)

    def test_nonnegative_above_hp_at_T0(self):
        res = e1_prime_binary(0.1, 0.34, 0.0)
        assert res.value >= 0.0

    def test_finite_case_matches_dense_grid(self):
        p, R, T = 0.1, 0.5, 0.0
        res = e1_prime_binary(p, R, T)
        grid = np.linspace(0.0, 8.0, 20001)
        dense = max(e1_prime_branch(p, R, T, s) for s in grid)
        assert res.value >= dense - 1e-9
        assert abs(res.value - dense) < 1e-6

    def test_b_branch_identity(self):
        # the direct divergence form of the B branch equals the L-based assembly
        p = 0.1
        rng = np.random.default_rng(3)
        for _ in range(100):
            s = rng.uniform(0.0, 1.0)
            R = rng.uniform(binary_entropy(p), binary_entropy(tilted_crossover(p, s)))
            if classify_region(p, R, s) != "B":
                continue
            T = rng.uniform(-1.0, 1.0)
            L = l_closed_form(p, R, s)[0]
            assembled = (
                L + s * math.log(1 / (1 - p)) - math.log(p ** (1 - s) + (1 - p) ** (1 - s)) - s * T
            )
            assert abs(e1_prime_branch(p, R, T, s) - assembled) < 1e-10

    def test_branch_matches_l_assembly_everywhere(self):
        p = 0.1
        rng = np.random.default_rng(4)
        for _ in range(200):
            s = rng.uniform(0.0, 6.0)
            R = rng.uniform(0.0, LN2)
            T = rng.uniform(-1.0, 1.0)
            L = l_closed_form(p, R, s)[0]
            assembled = (
                L
                + s * math.log(1 / (1 - p))
                - float(np.logaddexp((1 - s) * math.log(p), (1 - s) * math.log(1 - p)))
                - s * T
            )
            assert abs(e1_prime_branch(p, R, T, s) - assembled) < 1e-9

    def test_dominates_gf(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            p = rng.uniform(0.03, 0.5)
            R = rng.uniform(0.05, LN2)
            T = rng.uniform(-0.8, 0.4)
            prime = e1_prime_binary(p, R, T).value
            base = gf_e1(BinarySymmetricPair(p), R, T).value
            assert prime >= base - 1e-6

    def test_e2_prime_offset(self):
        res1 = e1_prime_binary(0.1, 0.5, 0.1)
        res2 = e2_prime_binary(0.1, 0.5, 0.1)
        assert res2.value == pytest.approx(res1.value + 0.1)


class TestVeryNoisy:
    def test_tau8(self):
        up, low = very_noisy_bounds(0.01, 8.0, 1.0)
        assert up == pytest.approx(1e-3)
        assert low == pytest.approx(7e-4)

    def test_tau_to_4_limit(self):
        up, low = very_noisy_bounds(0.01, 4.0 + 1e-9, 1.0)
        assert up == pytest.approx(6e-4, rel=1e-6)
        assert low == pytest.approx(2e-4, rel=1e-3)

    def test_ratio_grows(self):
        up, low = very_noisy_bounds(0.01, 100.0, 1.0)
        assert low / up == pytest.approx(674 / 102, rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            very_noisy_bounds(0.2, 8.0, 1.0)
        with pytest.raises(DomainError):
            very_noisy_bounds(0.01, 4.0, 1.0)
        with pytest.raises(DomainError):
            very_noisy_bounds(0.01, 8.0, 1.5)

    def test_gamma_quadratic_accuracy(self):
        eps = 0.01
        for t in (0.5, 1.5, 3.0):
            exact = -math.log((0.5 - eps) ** t + (0.5 + eps) ** t)
            assert abs(gamma_quadratic(t, eps) - exact) < 5e-6


def test_phase_point_record():
    pt = phase_point(0.1, 0.5, 0.5)
    assert pt.region == "B"
    assert pt.L_value == pytest.approx(l_objective(0.1, 0.5, 0.5, pt.delta_star), abs=1e-10)
