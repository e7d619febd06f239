import itertools
import math

import numpy as np
import pytest

from swexp.errors import DomainError
from swexp.gallager_forney import e1 as gf_e1
from swexp.source_model import BinarySymmetricPair, JointSource, LN2
from swexp.tce_binary import e1_prime_binary, l_closed_form
from swexp.tce_general import _Ctx, e1_prime_general, e1_prime_general_at_s, inner_l

BSS = BinarySymmetricPair(0.1)


def random_source(seed, nx=3, ny=3):
    rng = np.random.default_rng(seed)
    m = rng.random((nx, ny))
    m /= m.sum()
    return JointSource(tuple("abcdef"[:nx]), tuple("012345"[:ny]), m)


def inner_objective(ctx, w, cond_prime, R, s):
    """Direct evaluation of the inner objective at a specific conditional."""
    d = 0.0
    h = 0.0
    for yi in range(ctx.src.ny):
        q = cond_prime[yi]
        pos = q > 0
        if np.any(pos & ~ctx.supp[yi]):
            return math.inf if s > 0 else (1 - s) * max(R - _entropy_row(q), 0.0)
        d += w[yi] * float(np.sum(q[pos] * np.log(q[pos] / ctx.cond_yx[yi][pos])))
        h += w[yi] * _entropy_row(q)
    return s * (d + R) + (1 - s) * max(R - h, 0.0)


def _entropy_row(q):
    pos = q > 0
    return float(-np.sum(q[pos] * np.log(q[pos])))


def simplex_points(dim, k):
    pts = []
    for c in itertools.product(range(k + 1), repeat=dim - 1):
        if sum(c) <= k:
            pts.append(np.array(list(c) + [k - sum(c)], dtype=float) / k)
    return pts


class TestInnerL:
    def test_s_zero_free(self):
        res = inner_l(BSS, [0.5, 0.5], 0.4, 0.0)
        assert res.value == 0.0
        res = inner_l(BSS, [0.5, 0.5], LN2, 0.0)
        assert res.value == pytest.approx(0.0, abs=1e-12)
        src = random_source(0)
        res = inner_l(src, [0.2, 0.5, 0.3], math.log(3), 0.0)
        assert res.value == pytest.approx(0.0, abs=1e-12)

    def test_source_conditional_is_upper_bound(self):
        ctx = _Ctx(random_source(1))
        w = np.array([0.3, 0.3, 0.4])
        for s in (0.2, 0.7, 1.0, 2.0):
            for R in (0.2, 0.6, 1.0):
                res = inner_l(ctx, w, R, s)
                h_xy = float(w @ ctx.H1)
                ub = s * R + (1 - s) * max(R - h_xy, 0.0)
                assert res.value <= ub + 1e-12

    def test_value_equals_objective_at_minimizer(self):
        ctx = _Ctx(random_source(2))
        rng = np.random.default_rng(3)
        for _ in range(30):
            w = rng.dirichlet(np.ones(3))
            s = rng.uniform(0.0, 3.0)
            R = rng.uniform(0.05, math.log(3))
            res = inner_l(ctx, w, R, s)
            direct = inner_objective(ctx, w, res.conditional, R, s)
            assert abs(res.value - direct) < 1e-8

    def test_bss_uniform_matches_binary_closed_form(self):
        ctx = _Ctx(BSS)
        for R in np.linspace(0.05, 0.69, 9):
            for s in (0.0, 0.4, 0.8, 1.0, 1.6, 3.0):
                got = inner_l(ctx, [0.5, 0.5], R, s).value
                expect = l_closed_form(0.1, R, s)[0] + s * math.log(1 / 0.9)
                assert abs(got - expect) < 1e-5

    def test_dense_simplex_2x2(self):
        ctx = _Ctx(JointSource(("0", "1"), ("0", "1"), [[0.4, 0.15], [0.05, 0.4]]))
        grid = np.linspace(0.0, 1.0, 201)
        for s in (0.3, 0.9, 1.5, 2.5):
            for R in (0.15, 0.4, 0.6):
                w = np.array([0.45, 0.55])
                res = inner_l(ctx, w, R, s)
                best = math.inf
                for d0 in grid:
                    for d1 in grid:
                        cp = np.array([[d0, 1 - d0], [d1, 1 - d1]])
                        best = min(best, inner_objective(ctx, w, cp, R, s))
                assert res.value <= best + 1e-10
                assert best - res.value < 5e-4

    def test_dense_simplex_3x2(self):
        src = JointSource(("a", "b", "c"), ("0", "1"),
                          [[0.25, 0.05], [0.1, 0.2], [0.05, 0.35]])
        ctx = _Ctx(src)
        pts = simplex_points(3, 20)
        w = np.array([0.5, 0.5])
        for s in (0.5, 2.0):
            for R in (0.3, 0.8):
                res = inner_l(ctx, w, R, s)
                best = math.inf
                for q0 in pts:
                    for q1 in pts:
                        cp = np.stack([q0, q1])
                        best = min(best, inner_objective(ctx, w, cp, R, s))
                assert res.value <= best + 1e-10
                # slack is pure 1/20-grid granularity, growing with s
                assert best - res.value < 0.02 * max(1.0, s)

    def test_below_100_random_feasible_points(self):
        ctx = _Ctx(random_source(4))
        rng = np.random.default_rng(5)
        w = np.array([0.3, 0.4, 0.3])
        for s in (0.5, 1.5):
            res = inner_l(ctx, w, 0.7, s)
            for _ in range(100):
                cp = rng.dirichlet(np.ones(3), size=3)
                assert res.value <= inner_objective(ctx, w, cp, 0.7, s) + 1e-10

    def test_midpoint_convexity_for_s_below_one(self):
        ctx = _Ctx(random_source(6))
        rng = np.random.default_rng(7)
        w = np.array([0.2, 0.5, 0.3])
        for s in (0.2, 0.6, 1.0):
            for _ in range(40):
                c1 = rng.dirichlet(np.ones(3), size=3)
                c2 = rng.dirichlet(np.ones(3), size=3)
                f1 = inner_objective(ctx, w, c1, 0.5, s)
                f2 = inner_objective(ctx, w, c2, 0.5, s)
                fm = inner_objective(ctx, w, 0.5 * (c1 + c2), 0.5, s)
                assert fm <= 0.5 * (f1 + f2) + 1e-10

    def test_validation(self):
        with pytest.raises(DomainError):
            inner_l(BSS, [0.5, 0.5], 0.4, -0.1)
        with pytest.raises(DomainError):
            inner_l(BSS, [0.3, 0.3, 0.4], 0.4, 1.0)


class TestE1PrimeGeneral:
    def test_matches_binary_on_grid(self):
        for R in (0.15, 0.4, 0.6):
            for T in (-0.4, 0.0, 0.15):
                g = e1_prime_general(BSS, R, T)
                b = e1_prime_binary(0.1, R, T)
                if math.isinf(b.value):
                    assert math.isinf(g.value)
                else:
                    assert abs(g.value - b.value) < 1e-4

    def test_divergent_point_both_infinite(self):
        T = math.log(1 / 9) - 0.1
        g = e1_prime_general(BSS, 0.5, T)
        b = e1_prime_binary(0.1, 0.5, T)
        assert g.diverged and b.diverged

    def test_monotone_in_R(self):
        src = random_source(8)
        vals = [e1_prime_general(src, R, 0.0).value for R in np.linspace(0.3, math.log(3), 5)]
        assert all(b >= a - 1e-6 for a, b in zip(vals, vals[1:]))
        assert vals[-1] == max(vals) and vals[-1] > 0.0  # full rate helps most

    def test_dominates_gf_on_random_3x3(self):
        rng = np.random.default_rng(9)
        for i in range(20):
            src = random_source(100 + i)
            R = rng.uniform(0.1, math.log(3))
            T = rng.uniform(-0.6, 0.3)
            prime = e1_prime_general(src, R, T).value
            base = gf_e1(src, R, T).value
            assert prime >= base - 1e-6, (i, R, T)

    def test_sup_min_ordering_fixed_s(self):
        # at fixed s the reported middle value is below any feasible P_Y'
        src = random_source(10)
        ctx = _Ctx(src)
        rng = np.random.default_rng(11)
        for s in (0.5, 1.5):
            v, w, cond = e1_prime_general_at_s(ctx, 0.6, s)
            tail = ctx.tail_terms(np.array([s]))[0]
            for _ in range(100):
                wr = rng.dirichlet(np.ones(3))
                kl = float(np.sum(wr * np.log(wr / ctx.py)))
                obj = kl + inner_l(ctx, wr, 0.6, s).value - float(wr @ tail)
                assert v <= obj + 1e-7

    def test_alphabet_cap(self):
        rng = np.random.default_rng(12)
        m = rng.random((7, 2))
        m /= m.sum()
        src = JointSource(tuple("abcdefg"), ("0", "1"), m)
        with pytest.raises(DomainError):
            e1_prime_general(src, 0.3, 0.0)
