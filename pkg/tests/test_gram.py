"""Gram systems against the brute-force variational oracle."""

import numpy as np
import pytest

import christoffel as ch
from christoffel.gram import FactorizationError
from conftest import random_instance


def oracle_at_support(gram, weights, lam, i):
    """Direct solve of the printed closed form, independent of the
    factored production route."""
    m = gram @ np.diag(weights) @ gram + lam * gram
    sol = np.linalg.solve(m, gram[:, i])
    return 1.0 / float(gram[:, i] @ sol)


def oracle_at_point(spec, points, weights, lam, z):
    """Representer solve over span{k(z,.), k(x_1,.), ..., k(x_n,.)}."""
    aug = np.vstack([np.atleast_2d(z), points])
    gram = ch.gram_matrix(spec, aug)
    wts = np.concatenate([[0.0], weights])
    return oracle_at_support(gram, wts, lam, 0)


def smoothing_matrix_form(gram, weights, lam, i):
    """eta_i / (K (K + lam diag(eta)^-1)^-1)_ii, valid for eta_i > 0."""
    shifted = gram + lam * np.diag(1.0 / weights)
    smooth = np.linalg.solve(shifted.T, gram.T).T
    return weights[i] / smooth[i, i]


class TestOnePoint:
    def test_unit_weight(self):
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.WeightedSample(np.array([[0.0]]), np.array([1.0]))
        for lam in (0.1, 0.5, 2.0):
            sys_ = ch.assemble(spec, sample, lam)
            # variational solution over the single representer coefficient
            assert ch.christoffel_at_support(sys_, 0) == pytest.approx(1.0 + lam, rel=1e-12)

    def test_zero_weight(self):
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.WeightedSample(np.array([[0.0]]), np.array([0.0]))
        sys_ = ch.assemble(spec, sample, 0.5)
        assert ch.christoffel_at_support(sys_, 0) == pytest.approx(0.5, rel=1e-12)

    def test_leverage_reciprocal(self):
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.WeightedSample(np.array([[0.0]]), np.array([1.0]))
        sys_ = ch.assemble(spec, sample, 1.0)
        assert ch.leverage_score(sys_, [0.0]) == pytest.approx(0.5, rel=1e-12)


class TestQueries:
    def test_far_query_hits_lambda_floor(self):
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.from_iid_sample(np.linspace(-1, 1, 5).reshape(-1, 1))
        sys_ = ch.assemble(spec, sample, 0.01)
        # v_z underflows to zero at huge distance, C -> lam / q(0)
        assert ch.christoffel_at_point(sys_, [2000.0]) == pytest.approx(0.01, rel=1e-12)

    def test_support_point_consistency(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            spec, sample, lam = random_instance(rng)
            sys_ = ch.assemble(spec, sample, lam)
            cs = ch.christoffel_at_support_all(sys_)
            cp = ch.christoffel_at_points(sys_, sample.points)
            np.testing.assert_allclose(cp, cs, rtol=1e-8)

    def test_oracle_equivalence(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            spec, sample, lam = random_instance(rng)
            sys_ = ch.assemble(spec, sample, lam)
            i = int(rng.integers(0, sample.n))
            got = ch.christoffel_at_support(sys_, i)
            ref = oracle_at_support(sys_.gram, sample.weights, lam, i)
            assert got == pytest.approx(ref, rel=1e-8)
            z = rng.uniform(-2.0, 2.0, size=sample.dimension)
            got_z = ch.christoffel_at_point(sys_, z)
            ref_z = oracle_at_point(spec, sample.points, sample.weights, lam, z)
            assert got_z == pytest.approx(ref_z, rel=1e-8)

    def test_dual_formula_identity(self):
        rng = np.random.default_rng(77)
        for _ in range(10):
            spec, sample, lam = random_instance(rng, positive_weights=True)
            sys_ = ch.assemble(spec, sample, lam)
            i = int(rng.integers(0, sample.n))
            eq3 = oracle_at_support(sys_.gram, sample.weights, lam, i)
            smooth = smoothing_matrix_form(sys_.gram, sample.weights, lam, i)
            assert abs(eq3 - smooth) / eq3 <= 1e-8
            assert ch.christoffel_at_support(sys_, i) == pytest.approx(eq3, rel=1e-8)

    def test_positive(self):
        rng = np.random.default_rng(3)
        spec, sample, lam = random_instance(rng)
        sys_ = ch.assemble(spec, sample, lam)
        zs = rng.uniform(-3, 3, size=(20, sample.dimension))
        assert np.all(ch.christoffel_at_points(sys_, zs) > 0)

    def test_rejects_bad_queries(self):
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.from_iid_sample(np.array([[0.0]]))
        sys_ = ch.assemble(spec, sample, 0.5)
        with pytest.raises(ValueError):
            ch.christoffel_at_point(sys_, [np.inf])
        with pytest.raises(IndexError):
            ch.christoffel_at_support(sys_, 5)


class TestPermutation:
    def test_equivariance(self):
        rng = np.random.default_rng(9)
        spec, sample, lam = random_instance(rng)
        perm = rng.permutation(sample.n)
        permuted = ch.WeightedSample(sample.points[perm], sample.weights[perm])
        sys_a = ch.assemble(spec, sample, lam)
        sys_b = ch.assemble(spec, permuted, lam)
        ca = ch.christoffel_at_support_all(sys_a)
        cb = ch.christoffel_at_support_all(sys_b)
        np.testing.assert_allclose(cb, ca[perm], rtol=1e-10)


class TestMonotonicity:
    def test_increasing_and_concave_in_lambda(self):
        rng = np.random.default_rng(15)
        for _ in range(5):
            spec, sample, _ = random_instance(rng)
            lam2 = float(rng.uniform(1e-3, 0.1))
            lam1, lam3 = lam2 / 4.0, lam2 * 4.0
            zs = rng.uniform(-2, 2, size=(4, sample.dimension))
            base = ch.assemble(spec, sample, lam1)
            c1 = ch.christoffel_at_points(base, zs)
            c2 = ch.christoffel_at_points(ch.refit_lambda(base, lam2), zs)
            c3 = ch.christoffel_at_points(ch.refit_lambda(base, lam3), zs)
            assert np.all(c1 < c2) and np.all(c2 < c3)
            chord = c1 + (c3 - c1) * (lam2 - lam1) / (lam3 - lam1)
            assert np.all(c2 >= chord * (1.0 - 1e-12))

    def test_more_mass_never_decreases(self):
        rng = np.random.default_rng(16)
        for _ in range(5):
            spec, sample, lam = random_instance(rng)
            zs = rng.uniform(-2, 2, size=(4, sample.dimension))
            c_before = ch.christoffel_at_points(ch.assemble(spec, sample, lam), zs)
            heavier = ch.WeightedSample(sample.points, sample.weights * 1.5)
            c_scaled = ch.christoffel_at_points(ch.assemble(spec, heavier, lam), zs)
            extra_pt = rng.uniform(-1, 1, size=(1, sample.dimension))
            grown = ch.WeightedSample(
                np.vstack([sample.points, extra_pt]),
                np.concatenate([sample.weights, [0.3]]),
            )
            c_grown = ch.christoffel_at_points(ch.assemble(spec, grown, lam), zs)
            assert np.all(c_scaled >= c_before * (1.0 - 1e-12))
            assert np.all(c_grown >= c_before * (1.0 - 1e-12))

    def test_kernel_addition_never_increases(self):
        rng = np.random.default_rng(17)
        for _ in range(5):
            spec, sample, lam = random_instance(rng)
            other = ch.matern(
                float(rng.choice([0.5, 1.5])), float(rng.uniform(0.5, 2.0)), sample.dimension
            )
            summed = ch.kernel_sum(spec, other)
            zs = rng.uniform(-2, 2, size=(4, sample.dimension))
            c_single = ch.christoffel_at_points(ch.assemble(spec, sample, lam), zs)
            c_sum = ch.christoffel_at_points(ch.assemble(summed, sample, lam), zs)
            assert np.all(c_sum <= c_single * (1.0 + 1e-12))

    def test_leverage_decreases_in_lambda(self):
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.from_iid_sample(np.linspace(-1, 1, 8).reshape(-1, 1))
        z = [0.3]
        lev = [
            ch.leverage_score(ch.assemble(spec, sample, lam), z)
            for lam in (1e-3, 1e-2, 1e-1)
        ]
        assert lev[0] > lev[1] > lev[2]


class TestRefit:
    def test_same_lambda_bitwise(self):
        rng = np.random.default_rng(30)
        spec, sample, lam = random_instance(rng)
        base = ch.assemble(spec, sample, lam)
        again = ch.refit_lambda(base, lam)
        np.testing.assert_array_equal(
            ch.christoffel_at_support_all(base), ch.christoffel_at_support_all(again)
        )

    def test_matches_fresh_assembly(self):
        rng = np.random.default_rng(31)
        spec, sample, lam = random_instance(rng)
        base = ch.assemble(spec, sample, lam)
        refit = ch.refit_lambda(base, lam * 7.0)
        fresh = ch.assemble(spec, sample, lam * 7.0)
        np.testing.assert_allclose(
            ch.christoffel_at_support_all(refit),
            ch.christoffel_at_support_all(fresh),
            rtol=1e-12,
        )

    def test_strictly_larger_c_at_larger_lambda(self):
        rng = np.random.default_rng(32)
        spec, sample, lam = random_instance(rng)
        base = ch.assemble(spec, sample, lam)
        bigger = ch.refit_lambda(base, lam * 3.0)
        assert np.all(
            ch.christoffel_at_support_all(bigger) > ch.christoffel_at_support_all(base)
        )

    def test_sweep_assembles_gram_once(self, monkeypatch):
        # a 10-value lambda sweep costs one kernel-matrix assembly
        import christoffel.gram as gram_mod

        calls = {"n": 0}
        original = gram_mod.gram_matrix

        def counting(spec, points):
            calls["n"] += 1
            return original(spec, points)

        monkeypatch.setattr(gram_mod, "gram_matrix", counting)
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.from_iid_sample(np.linspace(-1, 1, 12).reshape(-1, 1))
        sys_ = gram_mod.assemble(spec, sample, 1e-2)
        for lam in np.geomspace(1e-3, 1.0, 10):
            gram_mod.refit_lambda(sys_, lam)
        assert calls["n"] == 1


def test_concurrent_queries_match_serial():
    # GramSystem is immutable after assembly; parallel readers must see
    # exactly the serial results
    from concurrent.futures import ThreadPoolExecutor

    rng = np.random.default_rng(55)
    spec, sample, lam = random_instance(rng, n_max=15)
    sys_ = ch.assemble(spec, sample, lam)
    queries = [rng.uniform(-2, 2, size=(3, sample.dimension)) for _ in range(24)]
    serial = [ch.christoffel_at_points(sys_, q) for q in queries]
    with ThreadPoolExecutor(max_workers=8) as pool:
        parallel = list(pool.map(lambda q: ch.christoffel_at_points(sys_, q), queries))
    for s, p in zip(serial, parallel):
        np.testing.assert_array_equal(s, p)


class TestGuards:
    def test_lambda_floor(self):
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.from_iid_sample(np.linspace(-1, 1, 100).reshape(-1, 1))
        with pytest.raises(ValueError, match="floor"):
            ch.assemble(spec, sample, 1e-12)
        with pytest.raises(ValueError):
            ch.assemble(spec, sample, -1.0)

    def test_dimension_mismatch(self):
        spec = ch.matern(0.5, 1.0, 2)
        sample = ch.from_iid_sample(np.array([[0.0]]))
        with pytest.raises(ValueError, match="dimension"):
            ch.assemble(spec, sample, 0.1)

    def test_factor_residual_recorded(self):
        rng = np.random.default_rng(33)
        spec, sample, lam = random_instance(rng)
        sys_ = ch.assemble(spec, sample, lam)
        assert 0.0 <= sys_.factor_residual <= 1e-8
        assert sys_.jitter == 0.0

    def test_jitter_escalation(self, monkeypatch):
        import christoffel.gram as gram_mod

        real_cho = gram_mod.cho_factor
        state = {"failures": 2}

        def flaky(a, **kwargs):
            if state["failures"] > 0:
                state["failures"] -= 1
                raise gram_mod.LinAlgError("forced")
            return real_cho(a, **kwargs)

        monkeypatch.setattr(gram_mod, "cho_factor", flaky)
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.from_iid_sample(np.linspace(-1, 1, 6).reshape(-1, 1))
        sys_ = gram_mod.assemble(spec, sample, 1e-2)
        # two failures consume jitter steps 0 and 1e-12; success lands on 1e-11
        assert sys_.jitter == pytest.approx(1e-11)
        assert np.all(np.diag(sys_.gram) == pytest.approx(1.0 + 1e-11))
        c_vals = gram_mod.christoffel_at_support_all(sys_)
        assert np.all(c_vals > 0)

    def test_jitter_exhaustion_raises(self, monkeypatch):
        import christoffel.gram as gram_mod

        def always_fail(a, **kwargs):
            raise gram_mod.LinAlgError("forced")

        monkeypatch.setattr(gram_mod, "cho_factor", always_fail)
        spec = ch.matern(0.5, 1.0, 1)
        sample = ch.from_iid_sample(np.array([[0.0], [1.0]]))
        with pytest.raises(FactorizationError) as info:
            gram_mod.assemble(spec, sample, 1e-2)
        assert info.value.jitter == pytest.approx(1e-7)  # first value past the cap

    def test_factorization_error_type_exists(self):
        assert issubclass(FactorizationError, RuntimeError)
