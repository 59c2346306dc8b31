"""Weighted sup norms, bump functions, and the normalized gap ratios."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tubecomp.expressions import Const
from tubecomp.growth import (
    AnalyticFn,
    as_weight,
    imag_ratio_gap,
    make_f_a,
    make_g_am,
    power_ratio_gap,
    safe_exp,
    split_bound_gap,
    sup_estimate,
    weighted_lipschitz_ratio,
    weighted_modulus,
    weighted_value,
)
from tubecomp.halfplane import (
    Region,
    TubePoint,
    as_tube_point,
    pseudo_dist,
    sample_coords,
    sample_in_ball,
)
from tubecomp.search import SearchBudget

BUDGET = SearchBudget(16, 40)


def _random_center(rng, n):
    re = rng.uniform(-10.0, 10.0, n)
    im = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), n))
    return TubePoint(tuple(re + 1j * im))


class TestWeightedModulus:
    def test_constant_function(self):
        """For f = 1 the weighted modulus is the weight itself."""
        one = AnalyticFn(Const(1.0), 1)
        assert weighted_modulus(one, (1.0,), as_tube_point(2j)) == 2.0
        assert weighted_modulus(one, (2.0,), as_tube_point(2j)) == 4.0
        two = AnalyticFn(Const(1.0), 2)
        z = as_tube_point((2j, 1 + 3j))
        assert_allclose(weighted_modulus(two, (1.0, 2.0), z), 2.0 * 9.0, rtol=1e-15)

    def test_weight_validation(self):
        assert as_weight(1.5, 3).exponents == (1.5, 1.5, 1.5)
        with pytest.raises(ValueError):
            as_weight(0.0, 1)
        with pytest.raises(ValueError):
            as_weight((1.0, -2.0))
        with pytest.raises(ValueError):
            as_weight((1.0, 2.0), n=3)


class TestBumpF:
    def test_peak_is_exactly_one(self, rng):
        """The bump attains weighted modulus 1 at its own center."""
        for trial in range(60):
            n = trial % 3 + 1
            a = _random_center(rng, n)
            gamma = tuple(rng.uniform(0.25, 4.0, n))
            f = make_f_a(a, gamma)
            assert_allclose(weighted_modulus(f, gamma, a), 1.0, rtol=0, atol=1e-12)

    def test_hand_value(self):
        """n=1, a=i, gamma=1: the bump is -4/(z + i)^2 up to phase."""
        f = make_f_a(as_tube_point(1j), (1.0,))
        assert_allclose(weighted_value(f, (1.0,), as_tube_point(2j)), 8 / 9, rtol=1e-14)
        assert_allclose(weighted_modulus(f, (1.0,), as_tube_point(2j)), 8 / 9, rtol=1e-14)

    def test_closed_form_modulus(self, rng):
        """wm(f_a, w) = prod_k (1 - d(a_k, w_k)^2)^{gamma_k}.

        The reference uses 1 - d^2 = 4 Im a Im w / |w - conj(a)|^2, which is
        exact where the squared-distance form cancels catastrophically.
        """
        for trial in range(60):
            n = trial % 3 + 1
            a = _random_center(rng, n)
            gamma = tuple(rng.uniform(0.25, 4.0, n))
            f = make_f_a(a, gamma)
            w = TubePoint(tuple(sample_coords(rng, 1, n).ravel()))
            want = math.prod(
                (4.0 * ak.imag * wk.imag / abs(wk - ak.conjugate()) ** 2) ** gk
                for ak, wk, gk in zip(a.coords, w.coords, gamma)
            )
            assert_allclose(weighted_modulus(f, gamma, w), want, rtol=1e-10, atol=1e-300)
            # and the two reference forms agree away from the ball's edge
            d = max(pseudo_dist(ak, wk) for ak, wk in zip(a.coords, w.coords))
            if d < 0.9:
                loose = math.prod(
                    (1.0 - pseudo_dist(ak, wk) ** 2) ** gk
                    for ak, wk, gk in zip(a.coords, w.coords, gamma)
                )
                assert_allclose(weighted_modulus(f, gamma, w), loose, rtol=1e-9)

    def test_never_exceeds_one(self, rng):
        for trial in range(40):
            n = trial % 3 + 1
            a = _random_center(rng, n)
            gamma = tuple(rng.uniform(0.25, 4.0, n))
            f = make_f_a(a, gamma)
            P = sample_coords(rng, 256, n)
            vals = np.exp(np.asarray(
                [weighted_modulus(f, gamma, TubePoint(tuple(row)))
                 for row in P[:16]]
            ))
            # log path over the full batch
            from tubecomp.growth import log_weighted_modulus_vec
            lg = log_weighted_modulus_vec(f, as_weight(gamma), P)
            assert np.nanmax(lg) <= 1e-12

    def test_uniform_decay_near_boundary(self):
        """Centers collapsing to the boundary kill the bump on any fixed box."""
        ima = 1e-8
        a = as_tube_point(0.3 + 1j * ima)
        f = make_f_a(a, (1.0,))
        re = np.linspace(-1.0, 1.0, 32)
        im = np.linspace(0.5, 2.0, 32)
        worst = 0.0
        for x in re:
            for y in im:
                worst = max(worst, abs(f(as_tube_point(complex(x, y)))))
        assert worst <= 16.0 * ima * (1 + 1e-9)
        assert worst < 1e-6


class TestBumpG:
    def test_vanishes_at_center(self, rng):
        for trial in range(20):
            n = trial % 3 + 1
            a = _random_center(rng, n)
            gamma = tuple(rng.uniform(0.25, 4.0, n))
            g = make_g_am(a, 1 + trial % n, gamma)
            assert weighted_modulus(g, gamma, a) == 0.0

    def test_factorization_against_bump(self, rng):
        """wm(g_{a,m}, w) = wm(f_a, w) * d(a_m, w_m): one extra first-power factor."""
        for trial in range(60):
            n = trial % 3 + 1
            m = 1 + trial % n
            a = _random_center(rng, n)
            gamma = tuple(rng.uniform(0.25, 4.0, n))
            f = make_f_a(a, gamma)
            g = make_g_am(a, m, gamma)
            w = TubePoint(tuple(sample_coords(rng, 1, n).ravel()))
            d = pseudo_dist(a.coords[m - 1], w.coords[m - 1])
            want = weighted_modulus(f, gamma, w) * d
            assert_allclose(weighted_modulus(g, gamma, w), want, rtol=1e-10, atol=1e-300)

    def test_never_exceeds_one(self, rng):
        from tubecomp.growth import log_weighted_modulus_vec
        for trial in range(40):
            n = trial % 3 + 1
            a = _random_center(rng, n)
            gamma = tuple(rng.uniform(0.25, 4.0, n))
            g = make_g_am(a, 1 + trial % n, gamma)
            P = sample_coords(rng, 256, n)
            lg = log_weighted_modulus_vec(g, as_weight(gamma), P)
            assert np.nanmax(lg) <= 1e-12

    def test_bad_index_rejected(self):
        a = as_tube_point((1j, 2j))
        with pytest.raises(IndexError):
            make_g_am(a, 0, (1.0, 1.0))
        with pytest.raises(IndexError):
            make_g_am(a, 3, (1.0, 1.0))


class TestSupEstimate:
    def test_deterministic(self):
        f = make_f_a(as_tube_point(0.5 + 2j), (1.5,))
        r1 = sup_estimate(f, (1.5,), Region.whole(1), BUDGET, seed=3)
        r2 = sup_estimate(f, (1.5,), Region.whole(1), BUDGET, seed=3)
        assert r1.value == r2.value
        assert r1.witness.coords == r2.witness.coords

    def test_value_matches_witness(self, rng):
        for trial in range(10):
            n = trial % 2 + 1
            a = _random_center(rng, n)
            gamma = tuple(rng.uniform(0.5, 2.0, n))
            f = make_f_a(a, gamma)
            est = sup_estimate(f, gamma, Region.whole(n), BUDGET, seed=trial)
            assert_allclose(est.value, weighted_modulus(f, gamma, est.witness), rtol=1e-12)

    def test_injected_optimum_dominates(self):
        a = as_tube_point(-2.0 + 0.01j)
        f = make_f_a(a, (1.0,))
        est = sup_estimate(f, (1.0,), Region.whole(1), SearchBudget(4, 0), seed=0, inject=(a,))
        assert_allclose(est.value, 1.0, rtol=0, atol=1e-12)

    def test_monotone_under_region_growth(self):
        """A larger region search seeded with the smaller witness cannot lose."""
        f = make_f_a(as_tube_point(1j), (1.0,))
        small = Region.box(((-1.0, 1.0),), ((2.0, 4.0),))
        big = Region.box(((-2.0, 2.0),), ((0.5, 8.0),))
        est_small = sup_estimate(f, (1.0,), small, BUDGET, seed=0)
        est_big = sup_estimate(f, (1.0,), big, BUDGET, seed=0, inject=(est_small.witness,))
        assert est_big.value >= est_small.value - 1e-15


class TestGapRatios:
    def test_imag_ratio_hand_value(self):
        assert imag_ratio_gap(as_tube_point(1j), as_tube_point(2j), 1.0) == 1.5

    def test_imag_ratio_formula(self, rng):
        for _ in range(50):
            z = TubePoint(tuple(sample_coords(rng, 1, 2).ravel()))
            w = as_tube_point(sample_in_ball(rng, z, 0.5), 2)
            s = tuple(rng.uniform(0.25, 4.0, 2))
            from tubecomp.halfplane import rho
            r = rho(z, w)
            if r == 0.0:
                continue
            want = abs(math.prod(
                (zk.imag / wk.imag) ** sk for zk, wk, sk in zip(z.coords, w.coords, s)
            ) - 1.0) / r
            assert_allclose(imag_ratio_gap(z, w, s), want, rtol=1e-10)

    def test_power_ratio_hand_value(self):
        got = power_ratio_gap(as_tube_point(1j), as_tube_point(1j), as_tube_point(2j), 1.0)
        assert_allclose(got, 1.0, rtol=1e-12)

    def test_power_ratio_formula(self, rng):
        from tubecomp.expressions import principal_power
        from tubecomp.halfplane import rho
        for _ in range(50):
            a = TubePoint(tuple(sample_coords(rng, 1, 2).ravel()))
            z = TubePoint(tuple(sample_coords(rng, 1, 2).ravel()))
            w = as_tube_point(sample_in_ball(rng, z, 0.5), 2)
            s = tuple(rng.uniform(0.25, 4.0, 2))
            r = rho(z, w)
            if r == 0.0:
                continue
            prod = 1.0 + 0j
            for ak, zk, wk, sk in zip(a.coords, z.coords, w.coords, s):
                prod *= principal_power((zk - ak.conjugate()) / (wk - ak.conjugate()), sk)
            want = abs(prod - 1.0) / r
            assert_allclose(power_ratio_gap(a, z, w, s), want, rtol=1e-10)


class TestLipschitzRatio:
    def test_zero_numerator_short_circuits(self):
        one = AnalyticFn(Const(1.0), 1)
        region = Region.box(((-1.0, 1.0),), ((1.0, 1.0),))
        z = as_tube_point(-0.5 + 1j)
        w = as_tube_point(0.5 + 1j)
        # equal weighted values on the Im = 1 slice
        assert weighted_lipschitz_ratio(one, (1.0,), region, z, w, budget=BUDGET) == 0.0

    def test_rejects_points_outside_region(self):
        f = make_f_a(as_tube_point(1j), (1.0,))
        region = Region.box(((-1.0, 1.0),), ((0.5, 2.0),))
        with pytest.raises(ValueError):
            weighted_lipschitz_ratio(f, (1.0,), region, as_tube_point(5 + 1j), as_tube_point(1j))

    def test_coincident_points_give_zero(self):
        """Equal arguments mean a zero numerator, which wins over rho = 0."""
        f = make_f_a(as_tube_point(1j), (1.0,))
        region = Region.box(((-1.0, 1.0),), ((0.5, 2.0),))
        z = as_tube_point(0.5 + 1j)
        assert weighted_lipschitz_ratio(f, (1.0,), region, z, z, budget=BUDGET) == 0.0

    def test_finite_on_generic_input(self, rng):
        f = make_f_a(as_tube_point(0.2 + 1j), (1.0,))
        region = Region.polydisc(as_tube_point(1j), (0.6,))
        z = as_tube_point(sample_in_ball(rng, as_tube_point(1j), 0.3))
        w = as_tube_point(sample_in_ball(rng, as_tube_point(1j), 0.3))
        if pseudo_dist(z.coords[0], w.coords[0]) == 0.0:
            return
        got = weighted_lipschitz_ratio(f, (1.0,), region, z, w, budget=BUDGET)
        assert math.isfinite(got) and got >= 0.0


class TestSplitBound:
    def test_left_side_never_beats_right_wildly(self, rng):
        """lhs stays within a small factor of rhs on in-ball configurations."""
        base = as_tube_point(1j)
        for trial in range(10):
            a = as_tube_point(sample_in_ball(rng, base, 0.3))
            f = make_f_a(a, (1.0,))
            phi_z = as_tube_point(sample_in_ball(rng, base, 0.25))
            psi_z = as_tube_point(sample_in_ball(rng, as_tube_point(phi_z.coords[0]), 0.5))
            omega1 = Region.polydisc(phi_z, (0.5,))
            omega2 = Region.polydisc(psi_z, (0.5,))
            lhs, rhs = split_bound_gap(
                f, (1.0,), phi_z, psi_z, base, 0.5, omega1, omega2, budget=BUDGET, seed=trial
            )
            assert math.isfinite(lhs) and math.isfinite(rhs)
            assert lhs >= 0.0 and rhs >= 0.0
            if rhs > 0:
                assert lhs <= 4.0 * rhs

    def test_h1_validation(self):
        f = make_f_a(as_tube_point(1j), (1.0,))
        region = Region.whole(1)
        z = as_tube_point(1j)
        with pytest.raises(ValueError):
            split_bound_gap(f, (1.0,), z, z, z, 1.5, region, region, budget=BUDGET)


def test_safe_exp_saturates():
    assert safe_exp(0.0) == 1.0
    assert safe_exp(1e4) == math.inf
    assert safe_exp(-1e4) == 0.0
