import numpy as np
import pytest

from strucfact import (NoiseSpec, build_identity, build_periodic, build_trig,
                       covariance_matrix, projected_noise_norm_bound,
                       replication_seed, sample_noise, sigma_op_norm)

SPECS = [
    NoiseSpec("iid", sigma=1.0),
    NoiseSpec("iid", sigma=0.3),
    NoiseSpec("ma1", sigma=1.0, theta=0.7),
    NoiseSpec("ma1", sigma=0.5, theta=-1.3),
    NoiseSpec("ar1", sigma=1.0, rho=0.6),
    NoiseSpec("ar1", sigma=2.0, rho=-0.8),
]


class TestNoiseSpec:
    def test_rejects_nonstationary_ar1(self):
        with pytest.raises(ValueError):
            NoiseSpec("ar1", sigma=1.0, rho=1.0)

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            NoiseSpec("iid", sigma=0.0)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            NoiseSpec("arma", sigma=1.0)


class TestSampleNoise:
    @pytest.mark.parametrize("spec", SPECS)
    def test_linear_in_sigma(self, spec):
        base = NoiseSpec(spec.kind, sigma=1.0, theta=spec.theta, rho=spec.rho)
        a = sample_noise(spec, 4, 10, seed=3)
        b = sample_noise(base, 4, 10, seed=3)
        np.testing.assert_allclose(a, spec.sigma * b, rtol=1e-12)

    def test_ma1_theta_zero_is_iid(self):
        ma = sample_noise(NoiseSpec("ma1", 1.0, theta=0.0), 3, 8, seed=5)
        iid = sample_noise(NoiseSpec("iid", 1.0), 3, 8, seed=5)
        np.testing.assert_array_equal(ma, iid)

    def test_deterministic_given_seed(self):
        spec = NoiseSpec("ar1", 1.0, rho=0.4)
        np.testing.assert_array_equal(sample_noise(spec, 5, 12, seed=9),
                                      sample_noise(spec, 5, 12, seed=9))
        assert not np.array_equal(sample_noise(spec, 5, 12, seed=9),
                                  sample_noise(spec, 5, 12, seed=10))

    def test_ar1_lag_one_autocovariance(self):
        spec = NoiseSpec("ar1", 1.0, rho=0.8)
        eps = sample_noise(spec, 200, 400, seed=123)
        lag0 = np.mean(eps * eps)
        lag1 = np.mean(eps[:, 1:] * eps[:, :-1])
        assert lag1 / lag0 == pytest.approx(0.8, rel=0.1)

    def test_ar1_stationary_variance(self):
        rho, sigma = 0.6, 2.0
        spec = NoiseSpec("ar1", sigma, rho=rho)
        eps = sample_noise(spec, 4000, 10, seed=77)
        # variance must be flat at sigma^2 over time (stationary start)
        np.testing.assert_allclose(np.mean(eps ** 2, axis=0), sigma ** 2,
                                   rtol=0.15)

    def test_replication_seeds_distinct(self):
        seeds = {replication_seed(42, r) for r in range(100)}
        assert len(seeds) == 100


class TestCovarianceMatrix:
    def test_iid(self):
        np.testing.assert_allclose(
            covariance_matrix(NoiseSpec("iid", 0.5), 4), 0.25 * np.eye(4))

    def test_ma1_theta_one(self):
        cov = covariance_matrix(NoiseSpec("ma1", 1.0, theta=1.0), 2)
        np.testing.assert_allclose(cov, [[2.0, -1.0], [-1.0, 2.0]])

    def test_ar1_half(self):
        cov = covariance_matrix(NoiseSpec("ar1", 1.0, rho=0.5), 3)
        np.testing.assert_allclose(
            cov, [[1.0, 0.5, 0.25], [0.5, 1.0, 0.5], [0.25, 0.5, 1.0]])

    @pytest.mark.parametrize("spec", SPECS)
    @pytest.mark.parametrize("horizon", [3, 10, 50])
    def test_symmetric_psd(self, spec, horizon):
        cov = covariance_matrix(spec, horizon)
        np.testing.assert_array_equal(cov, cov.T)
        assert np.linalg.eigvalsh(cov)[0] >= -1e-10

    def test_matches_empirical_covariance(self):
        for spec in (NoiseSpec("iid", 1.0),
                     NoiseSpec("ma1", 1.0, theta=0.5),
                     NoiseSpec("ar1", 1.0, rho=0.6)):
            eps = sample_noise(spec, 5000, 20, seed=2024)
            emp = eps.T @ eps / 5000
            cov = covariance_matrix(spec, 20)
            rel = (np.linalg.norm(emp - cov, 2) / np.linalg.norm(cov, 2))
            assert rel < 0.2


class TestSigmaOpNorm:
    def test_iid(self):
        summary = sigma_op_norm(NoiseSpec("iid", 2.0), 10)
        assert summary.op_norm == 4.0 and summary.bound == 4.0 and summary.exact

    def test_ma1_theta_one_t3(self):
        # tridiag(-1, 2, -1) eigenvalues are 2 - sqrt(2), 2, 2 + sqrt(2)
        summary = sigma_op_norm(NoiseSpec("ma1", 1.0, theta=1.0), 3)
        assert summary.op_norm == pytest.approx(2.0 + np.sqrt(2.0))
        oracle = np.linalg.eigvalsh(
            covariance_matrix(NoiseSpec("ma1", 1.0, theta=1.0), 3))[-1]
        assert summary.op_norm == pytest.approx(oracle, rel=1e-12)

    def test_ar1_bound(self):
        summary = sigma_op_norm(NoiseSpec("ar1", 1.0, rho=0.5), 50)
        assert summary.op_norm <= summary.bound == pytest.approx(3.0)
        assert not summary.exact

    @pytest.mark.parametrize("spec", SPECS)
    @pytest.mark.parametrize("horizon", [3, 10, 50])
    def test_matches_dense_eigensolver(self, spec, horizon):
        summary = sigma_op_norm(spec, horizon)
        oracle = np.linalg.eigvalsh(covariance_matrix(spec, horizon))[-1]
        assert summary.op_norm == pytest.approx(oracle, rel=1e-8)

    def test_op_norm_below_bound_on_grid(self):
        for theta in np.linspace(-2.0, 2.0, 17):
            s = sigma_op_norm(NoiseSpec("ma1", 1.0, theta=float(theta)), 25)
            assert s.op_norm <= s.bound * (1 + 1e-9)
        for rho in np.linspace(-0.94, 0.94, 17):
            s = sigma_op_norm(NoiseSpec("ar1", 1.0, rho=float(rho)), 25)
            assert s.op_norm <= s.bound * (1 + 1e-9)


class TestProjectedNoiseBound:
    def test_identity_basis(self):
        spec = NoiseSpec("ma1", 1.0, theta=0.4)
        basis = build_identity(12)
        assert projected_noise_norm_bound(spec, basis) == pytest.approx(
            sigma_op_norm(spec, 12).op_norm)

    def test_periodic_iid(self):
        basis = build_periodic(2, 8)
        assert projected_noise_norm_bound(NoiseSpec("iid", 1.0), basis) \
            == pytest.approx(0.25)

    def test_trig_iid(self):
        basis = build_trig(2, 16)
        assert projected_noise_norm_bound(NoiseSpec("iid", 1.0), basis) \
            == pytest.approx(1.0 / 16.0)

    @pytest.mark.parametrize("basis", [
        build_identity(12), build_periodic(3, 12), build_trig(2, 12)])
    @pytest.mark.parametrize("spec", [
        NoiseSpec("iid", 1.0),
        NoiseSpec("ma1", 1.0, theta=0.6),
        NoiseSpec("ar1", 1.0, rho=0.5)])
    def test_monte_carlo_projected_covariance_below_bound(self, basis, spec):
        eps = sample_noise(spec, 20000, basis.horizon, seed=55)
        proj = eps @ basis.rows.T / basis.gram_constant
        emp_cov = proj.T @ proj / proj.shape[0]
        emp_op = np.linalg.eigvalsh(emp_cov)[-1]
        assert emp_op <= projected_noise_norm_bound(spec, basis) * 1.1
