import numpy as np
import pytest

from spillnet.errors import LengthError, SingularDesignError
from spillnet.ingest import VolatilityPanel
from spillnet.var import (
    VarSpec,
    build_design,
    companion_matrix,
    companion_spectral_radius,
    fit_var,
    ma_coefficients,
    simulate_var,
)

from conftest import make_dates, random_stable_model


def panel_from_values(values):
    n, t = values.shape
    return VolatilityPanel(tuple(f"s{i:02d}" for i in range(n)), make_dates(t), values)


class TestVarSpec:
    def test_lag_bounds(self):
        with pytest.raises(ValueError):
            VarSpec(0)
        with pytest.raises(ValueError):
            VarSpec(21)
        assert VarSpec(3).include_intercept


class TestFitVar:
    def test_univariate_ar1_consistency(self):
        rng = np.random.default_rng(21)
        shocks = rng.normal(size=(10000, 1))
        values = simulate_var(np.array([[[0.5]]]), np.zeros(1), shocks)
        model = fit_var(panel_from_values(values), VarSpec(1))
        assert model.coefficients[0, 0, 0] == pytest.approx(0.5, abs=0.03)
        assert model.stable

    def test_constant_zero_panel_is_singular(self):
        with pytest.raises(SingularDesignError):
            fit_var(panel_from_values(np.zeros((2, 100))), VarSpec(1))

    def test_insufficient_observations(self):
        rng = np.random.default_rng(22)
        with pytest.raises(LengthError):
            fit_var(panel_from_values(rng.normal(size=(4, 15))), VarSpec(2))

    def test_bivariate_var2_recovery_within_3se(self):
        rng = np.random.default_rng(23)
        phi = np.array([
            [[0.4, 0.15], [-0.1, 0.3]],
            [[0.2, 0.0], [0.05, 0.25]],
        ])
        sigma = np.array([[1.0, 0.4], [0.4, 2.0]])
        shocks = rng.multivariate_normal(np.zeros(2), sigma, size=10000)
        values = simulate_var(phi, np.array([0.5, -0.2]), shocks)
        panel = panel_from_values(values)
        model = fit_var(panel, VarSpec(2))
        assert model.stable

        # per-equation OLS standard errors as the reference yardstick
        x, y = build_design(values, 2, True)
        xtx_inv = np.linalg.inv(x.T @ x)
        resid = y - x @ np.linalg.lstsq(x, y, rcond=None)[0]
        dof = x.shape[0] - x.shape[1]
        for i in range(2):
            s2 = resid[:, i] @ resid[:, i] / dof
            se = np.sqrt(s2 * np.diag(xtx_inv))
            est = np.concatenate([[model.intercept[i]],
                                  model.coefficients[0][i], model.coefficients[1][i]])
            truth = np.concatenate([[[0.5, -0.2][i]], phi[0][i], phi[1][i]])
            assert np.all(np.abs(est - truth) <= 3.0 * se)

        # ML-style covariance divisor (T - p) and 5%-relative recovery
        assert model.t_eff == 10000 - 2
        assert np.allclose(model.residual_covariance, sigma, rtol=0.05)

    def test_covariance_is_symmetric_psd(self):
        rng = np.random.default_rng(24)
        model = fit_var(panel_from_values(rng.normal(size=(5, 300))), VarSpec(2))
        cov = model.residual_covariance
        assert np.abs(cov - cov.T).max() < 1e-10
        assert np.linalg.eigvalsh(cov).min() >= -1e-8

    def test_exact_recovery_on_noiseless_simulation(self):
        rng = np.random.default_rng(25)
        model_true = random_stable_model(rng, 3, 2)
        initial = rng.normal(size=(2, 3))
        values = simulate_var(model_true.coefficients, np.zeros(3),
                              np.zeros((60, 3)), initial=initial)
        fitted = fit_var(panel_from_values(values), VarSpec(2, include_intercept=False))
        np.testing.assert_allclose(fitted.coefficients, model_true.coefficients, atol=1e-8)

    def test_reordering_equivariance(self):
        rng = np.random.default_rng(26)
        values = rng.normal(size=(4, 200)) + rng.normal(size=(1, 200))
        panel = panel_from_values(values)
        model = fit_var(panel, VarSpec(2))
        perm = np.array([2, 0, 3, 1])
        permuted = VolatilityPanel(tuple(panel.series_ids[k] for k in perm),
                                   panel.dates, values[perm])
        model_p = fit_var(permuted, VarSpec(2))
        for k in range(2):
            np.testing.assert_allclose(model_p.coefficients[k],
                                       model.coefficients[k][perm][:, perm], atol=1e-10)
        np.testing.assert_allclose(model_p.residual_covariance,
                                   model.residual_covariance[perm][:, perm], atol=1e-10)

    def test_unstable_fit_is_flagged_not_rejected(self):
        rng = np.random.default_rng(27)
        shocks = rng.normal(scale=0.01, size=(80, 1))
        values = simulate_var(np.array([[[1.05]]]), np.zeros(1), shocks,
                              initial=np.array([[1.0]]))
        model = fit_var(panel_from_values(values), VarSpec(1))
        assert not model.stable
        assert model.max_companion_modulus > 1.0


class TestCompanion:
    def test_var1_companion_is_phi(self):
        phi = np.array([[[0.3, 0.1], [0.0, 0.2]]])
        np.testing.assert_array_equal(companion_matrix(phi), phi[0])

    def test_var2_block_structure(self):
        phi = np.arange(8.0).reshape(2, 2, 2)
        c = companion_matrix(phi)
        assert c.shape == (4, 4)
        np.testing.assert_array_equal(c[:2, :2], phi[0])
        np.testing.assert_array_equal(c[:2, 2:], phi[1])
        np.testing.assert_array_equal(c[2:, :2], np.eye(2))
        np.testing.assert_array_equal(c[2:, 2:], np.zeros((2, 2)))

    def test_radius_of_known_matrix(self):
        phi = np.array([[[0.5, 0.0], [0.0, -0.8]]])
        assert companion_spectral_radius(phi) == pytest.approx(0.8, abs=1e-12)


class TestMaCoefficients:
    def test_zero_phi_collapses(self):
        rng = np.random.default_rng(31)
        model = random_stable_model(rng, 3, 2)
        zero = type(model)(model.spec, model.series_ids,
                           np.zeros_like(model.coefficients), model.intercept,
                           model.residual_covariance, model.t_eff, True, 0.0)
        ma = ma_coefficients(zero, 5).matrices
        np.testing.assert_array_equal(ma[0], np.eye(3))
        np.testing.assert_array_equal(ma[1:], np.zeros((4, 3, 3)))

    def test_scalar_geometric_sequence(self):
        rng = np.random.default_rng(32)
        model = random_stable_model(rng, 1, 1)
        object.__setattr__(model, "coefficients", np.array([[[0.5]]]))
        ma = ma_coefficients(model, 8).matrices
        for h in range(8):
            assert ma[h][0, 0] == pytest.approx(0.5 ** h, rel=1e-12)

    def test_horizon_one_is_identity_exactly(self):
        rng = np.random.default_rng(33)
        for n, p in [(2, 1), (4, 2), (3, 3)]:
            model = random_stable_model(rng, n, p)
            ma = ma_coefficients(model, 1).matrices
            assert ma.shape == (1, n, n)
            assert np.array_equal(ma[0], np.eye(n))

    def test_var2_recursion_against_direct_products(self):
        rng = np.random.default_rng(34)
        phi1 = rng.normal(scale=0.1, size=(3, 3))
        phi2 = rng.normal(scale=0.1, size=(3, 3))
        model = random_stable_model(rng, 3, 2)
        object.__setattr__(model, "coefficients", np.stack([phi1, phi2]))
        ma = ma_coefficients(model, 4).matrices
        a1 = phi1
        a2 = phi1 @ a1 + phi2
        a3 = phi1 @ a2 + phi2 @ a1
        np.testing.assert_allclose(ma[1], a1, atol=1e-14)
        np.testing.assert_allclose(ma[2], a2, atol=1e-14)
        np.testing.assert_allclose(ma[3], a3, atol=1e-14)

    def test_stable_model_decay_bound(self):
        rng = np.random.default_rng(35)
        for _ in range(5):
            model = random_stable_model(rng, 4, 2)
            rho = model.max_companion_modulus
            ma = ma_coefficients(model, 50).matrices
            norms = np.abs(ma).max(axis=(1, 2))
            bound = 50.0 * np.maximum(rho, 0.1) ** np.arange(50)
            assert np.all(norms[10:] <= bound[10:])

    def test_bad_horizon(self):
        rng = np.random.default_rng(36)
        with pytest.raises(ValueError):
            ma_coefficients(random_stable_model(rng, 2, 1), 0)
