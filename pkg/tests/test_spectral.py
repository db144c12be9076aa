"""Spectral profile: D(lambda), q0, the extremal function and predictors.

The Matern nu=1/2, l=1, d=1 kernel has q_hat = 2/(1+w^2), for which
everything is analytic:

    D(lam)   = sqrt(lam (lam + 2))
    q0       = 1/sqrt(2)
    f_lam(x) = exp(-sqrt((2+lam)/lam) |x|)

These closed forms anchor most assertions here.
"""

import numpy as np
import pytest

import christoffel as ch


@pytest.fixture(scope="module")
def laplace_profile():
    return ch.SpectralProfile.from_kernel(ch.matern(0.5, 1.0, 1))


def d_closed(lam):
    return np.sqrt(lam * (lam + 2.0))


class TestComputeD:
    def test_closed_form_sweep(self, laplace_profile):
        for lam in np.geomspace(1e-8, 10.0, 20):
            assert ch.compute_D(laplace_profile, lam) == pytest.approx(
                d_closed(lam), rel=1e-6
            )

    def test_spot_values(self, laplace_profile):
        assert ch.compute_D(laplace_profile, 1.0) == pytest.approx(np.sqrt(3.0), rel=1e-8)
        assert ch.compute_D(laplace_profile, 1e-4) == pytest.approx(
            np.sqrt(1e-4 * 2.0001), rel=1e-8
        )

    def test_monotone_in_lambda(self, laplace_profile):
        lams = np.geomspace(1e-6, 1.0, 8)
        vals = [ch.compute_D(laplace_profile, lam) for lam in lams]
        assert np.all(np.diff(vals) > 0)

    def test_lower_bound_all_families(self):
        specs = [
            ch.matern(0.5, 1.0, 1),
            ch.matern(1.5, 0.5, 2),
            ch.gaussian(1.0, 1),
            ch.radial_profile_kernel(lambda r: 1.0 / (1.0 + r * r) ** 2, 1.0, 2.0, 1),
        ]
        for spec in specs:
            prof = ch.SpectralProfile.from_kernel(spec)
            q0 = spec.q_zero()
            for lam in np.geomspace(1e-6, 10.0, 7):
                assert ch.compute_D(prof, lam) * q0 / lam >= 1.0 - 1e-9

    def test_sobolev_radial_profile_closed_form(self):
        # q_hat = 1/(1+r^2): D(lam) = 2 sqrt(lam (1+lam))
        prof = ch.SpectralProfile.from_kernel(
            ch.radial_profile_kernel(lambda r: 1.0 / (1.0 + r * r), 1.0, 1.0, 1)
        )
        for lam in (1e-4, 1e-2, 0.3):
            assert ch.compute_D(prof, lam) == pytest.approx(
                2.0 * np.sqrt(lam * (1.0 + lam)), rel=1e-8
            )

    def test_rejects_bad_lambda(self, laplace_profile):
        with pytest.raises(ValueError):
            ch.compute_D(laplace_profile, 0.0)


class TestQ0:
    def test_laplace_value(self, laplace_profile):
        assert laplace_profile.q0 == pytest.approx(2.0**-0.5, abs=1e-6)
        assert laplace_profile.q0_closed_form == pytest.approx(2.0**-0.5, abs=1e-12)
        assert laplace_profile.q0_quadrature_limit == pytest.approx(2.0**-0.5, abs=1e-6)

    @pytest.mark.parametrize("nu,d", [(0.5, 1), (1.0, 1), (1.5, 1), (1.0, 2)])
    def test_dual_computation_agrees(self, nu, d):
        prof = ch.SpectralProfile.from_kernel(ch.matern(nu, 1.0, d))
        gap = abs(prof.q0_closed_form - prof.q0_quadrature_limit)
        assert gap / prof.q0_quadrature_limit <= 0.01
        assert prof.q0 > 0

    def test_radial_profile_value(self):
        prof = ch.SpectralProfile.from_kernel(
            ch.radial_profile_kernel(lambda r: 1.0 / (1.0 + r * r), 1.0, 1.0, 1)
        )
        assert prof.q0 == pytest.approx(0.5, rel=1e-4)
        assert ch.compute_q0(prof) == prof.q0

    def test_gaussian_has_no_q0(self):
        prof = ch.SpectralProfile.from_kernel(ch.gaussian(1.0, 1))
        assert prof.q0 is None and prof.beta is None
        with pytest.raises(ValueError):
            ch.compute_q0(prof)

    def test_disagreement_diagnostic_prefers_quadrature(self):
        # misstated decay exponents make the reference value wrong; the
        # profile must warn and fall back to the quadrature limit
        spec = ch.radial_profile_kernel(
            lambda r: 1.0 / (1.0 + r * r) ** 2, 1.0, 1.5, 1
        )
        with pytest.warns(RuntimeWarning, match="quadrature"):
            prof = ch.SpectralProfile.from_kernel(spec)
        assert prof.q0 == prof.q0_quadrature_limit
        assert prof.q0 != prof.q0_closed_form

    def test_scaling_law_slope(self):
        for nu in (0.5, 1.0, 1.5):
            prof = ch.SpectralProfile.from_kernel(ch.matern(nu, 1.0, 1))
            lams = np.geomspace(1e-8, 1e-6, 5)
            vals = [ch.compute_D(prof, lam) for lam in lams]
            slope = np.polyfit(np.log(lams), np.log(vals), 1)[0]
            assert abs(slope - prof.beta) <= 0.02

    def test_gaussian_log_contrast(self):
        # D(lam) * log(1/lam) stays within a factor of 5 of constant
        prof = ch.SpectralProfile.from_kernel(ch.gaussian(1.0, 1))
        vals = [
            ch.compute_D(prof, lam) * np.log(1.0 / lam)
            for lam in np.geomspace(1e-6, 1e-2, 7)
        ]
        assert max(vals) / min(vals) <= 5.0


class TestFLambda:
    def test_normalized_at_origin(self, laplace_profile):
        for lam in (1.0, 1e-2, 1e-4):
            assert abs(ch.eval_f_lambda(laplace_profile, lam, 0.0) - 1.0) <= 1e-6

    @pytest.mark.parametrize("lam", [1.0, 1e-2, 1e-4])
    @pytest.mark.parametrize("x", [0.25, 0.5, 1.0])
    def test_laplace_closed_form(self, laplace_profile, lam, x):
        ref = np.exp(-np.sqrt((2.0 + lam) / lam) * x)
        assert ch.eval_f_lambda(laplace_profile, lam, x) == pytest.approx(ref, abs=1e-5)

    def test_even(self, laplace_profile):
        a = ch.eval_f_lambda(laplace_profile, 0.5, 0.7)
        b = ch.eval_f_lambda(laplace_profile, 0.5, -0.7)
        assert a == pytest.approx(b, rel=1e-9)

    def test_two_dimensional_origin(self):
        prof = ch.SpectralProfile.from_kernel(ch.matern(1.0, 0.5, 2))
        assert abs(ch.eval_f_lambda(prof, 0.1, [0.0, 0.0]) - 1.0) <= 1e-6

    def test_two_dimensional_radial(self):
        prof = ch.SpectralProfile.from_kernel(ch.matern(1.0, 0.5, 2))
        a = ch.eval_f_lambda(prof, 0.1, [0.3, 0.4])
        b = ch.eval_f_lambda(prof, 0.1, [0.5, 0.0])
        assert a == pytest.approx(b, rel=1e-6)
        assert 0.0 < a < 1.0


class TestTailMass:
    def test_laplace_analytic_value(self, laplace_profile):
        # integral of exp(-2 a |x|) over |x| >= eps is exp(-2 a eps)/a
        lam, eps = 1.0, 0.5
        a = np.sqrt((2.0 + lam) / lam)
        ref = (np.exp(-2.0 * a * eps) / a) / (lam * d_closed(lam))
        got = ch.tail_mass_ratio(laplace_profile, lam, eps)
        assert got == pytest.approx(ref, rel=1e-4)

    def test_small_lambda_ratio_tiny(self, laplace_profile):
        eps = ch.default_epsilon(laplace_profile, 1e-4)
        assert ch.tail_mass_ratio(laplace_profile, 1e-4, eps) < 1e-3

    def test_monotone_in_epsilon(self, laplace_profile):
        r1 = ch.tail_mass_ratio(laplace_profile, 0.5, 0.3)
        r2 = ch.tail_mass_ratio(laplace_profile, 0.5, 0.9)
        assert r2 < r1

    def test_decays_with_lambda(self, laplace_profile):
        r_hi = ch.tail_mass_ratio(laplace_profile, 1e-2, 1e-2**0.05)
        r_lo = ch.tail_mass_ratio(laplace_profile, 1e-6, 1e-6**0.05)
        assert r_lo < r_hi

    def test_default_epsilon_formula(self, laplace_profile):
        # l = 0.9 (1 - beta)/(8 p), p = ceil(s gamma) = 1, beta = 1/2
        assert ch.default_epsilon(laplace_profile, 1e-4) == pytest.approx(
            1e-4 ** (0.9 * 0.5 / 8.0)
        )


def test_concurrent_evaluation_matches_serial(laplace_profile):
    # quadrature scratch state is per call; concurrent callers must agree
    # with serial evaluation
    from concurrent.futures import ThreadPoolExecutor

    cases = [(lam, x) for lam in (1.0, 1e-2, 1e-3) for x in np.linspace(0.1, 1.2, 8)]

    def evaluate(case):
        lam, x = case
        prof = ch.SpectralProfile.from_kernel(ch.matern(0.5, 1.0, 1))
        return ch.eval_f_lambda(prof, lam, x)

    serial = [evaluate(c) for c in cases]
    with ThreadPoolExecutor(max_workers=8) as pool:
        parallel = list(pool.map(evaluate, cases))
    np.testing.assert_allclose(parallel, serial, rtol=1e-10, atol=1e-12)


class TestPredictors:
    def test_inside_scaling_identity(self, laplace_profile):
        for lam in (1e-4, 1e-2):
            assert ch.predict_inside(laplace_profile, lam, 1.0) == pytest.approx(
                ch.compute_D(laplace_profile, lam), rel=1e-12
            )

    def test_inside_closed_form(self, laplace_profile):
        # p D(lam/p) = sqrt(lam^2 + 2 lam p) for the Laplace kernel
        lam, p_z = 1e-4, 0.5
        assert ch.predict_inside(laplace_profile, lam, p_z) == pytest.approx(
            np.sqrt(lam**2 + 2 * lam * p_z), rel=1e-8
        )
        assert np.sqrt(lam**2 + 2 * lam * 0.5) == pytest.approx(0.0100005, rel=1e-5)

    def test_inside_increasing_in_density(self, laplace_profile):
        vals = [ch.predict_inside(laplace_profile, 1e-3, p) for p in (0.2, 0.5, 1.0, 2.0)]
        assert np.all(np.diff(vals) > 0)

    def test_asymptotic_values(self, laplace_profile):
        lam = 1e-6
        assert ch.predict_asymptotic(laplace_profile, lam, 1.0) == pytest.approx(
            lam**0.5 / laplace_profile.q0, rel=1e-12
        )
        assert ch.predict_asymptotic(laplace_profile, lam, 0.5) == pytest.approx(
            1e-3, rel=1e-6
        )

    def test_inside_over_asymptotic_to_one(self, laplace_profile):
        ratios = [
            ch.predict_inside(laplace_profile, lam, 0.7)
            / ch.predict_asymptotic(laplace_profile, lam, 0.7)
            for lam in (1e-2, 1e-4, 1e-6, 1e-8)
        ]
        assert abs(ratios[-1] - 1.0) < 1e-3
        assert np.all(np.diff([abs(r - 1.0) for r in ratios]) < 0)

    def test_outside_bounds(self, laplace_profile):
        lam = 1e-4
        bound_i, bound_ii = ch.predict_outside(laplace_profile, lam)
        assert bound_i == pytest.approx(1e-2 * np.sqrt(1e-2 * 2.01), rel=1e-6)
        assert bound_ii == lam
        assert bound_ii < bound_i
        tiny_i, tiny_ii = ch.predict_outside(laplace_profile, 1e-10)
        assert tiny_i < bound_i and tiny_ii < bound_ii

    def test_linear_bound_below_sqrt_bound_all_kernels(self):
        # lam = o(sqrt(lam) D(sqrt(lam))) whenever beta < 1
        profiles = [
            ch.SpectralProfile.from_kernel(ch.matern(0.5, 1.0, 1)),
            ch.SpectralProfile.from_kernel(ch.matern(1.0, 1.0, 1)),
            ch.SpectralProfile.from_kernel(ch.matern(1.5, 0.7, 2)),
            ch.SpectralProfile.from_kernel(
                ch.radial_profile_kernel(lambda r: 1.0 / (1.0 + r * r) ** 2, 1.0, 2.0, 1)
            ),
        ]
        for prof in profiles:
            for lam in (1e-3, 1e-5, 1e-7):
                bound_i, bound_ii = ch.predict_outside(prof, lam)
                assert bound_ii < bound_i

    def test_gaussian_predictors(self):
        prof = ch.SpectralProfile.from_kernel(ch.gaussian(1.0, 1))
        assert ch.predict_inside(prof, 1e-3, 0.5) > 0
        with pytest.raises(ValueError):
            ch.predict_asymptotic(prof, 1e-3, 0.5)
