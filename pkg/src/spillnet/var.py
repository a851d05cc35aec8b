"""Vector autoregression estimation and its moving-average representation.

Fits VAR(p) by least squares on the lagged design matrix (QR-based solver,
never normal equations: rolling windows put ~57 regressors on ~238 rows and
normal equations lose too much precision there). Stability is diagnosed from
the companion-matrix spectral radius but never blocks a fit, because rolling
windows legitimately pass through unstable stretches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import LengthError, SingularDesignError
from .ingest import VolatilityPanel
from .reductions import sorted_matmul


@dataclass(frozen=True)
class VarSpec:
    """Lag order and intercept choice for one VAR fit."""

    lag_order: int
    include_intercept: bool = True

    def __post_init__(self):
        if not 1 <= self.lag_order <= 20:
            raise ValueError(f"lag_order must be in [1, 20], got {self.lag_order}")


@dataclass(frozen=True)
class VarModel:
    """A fitted VAR: coefficients, residual covariance and stability diagnostics.

    ``coefficients`` has shape (p, N, N); ``residual_covariance`` is symmetric
    PSD with the maximum-likelihood divisor (T - p). The normalized variance
    decomposition is invariant to any scalar rescaling of the covariance, so
    the divisor choice cannot affect connectedness.
    """

    spec: VarSpec
    series_ids: tuple[str, ...]
    coefficients: np.ndarray
    intercept: np.ndarray
    residual_covariance: np.ndarray
    t_eff: int
    stable: bool
    max_companion_modulus: float

    @property
    def n_series(self) -> int:
        return len(self.series_ids)

    def to_dict(self) -> dict:
        return {
            "lag_order": self.spec.lag_order,
            "include_intercept": self.spec.include_intercept,
            "series_ids": list(self.series_ids),
            "coefficients": self.coefficients.tolist(),
            "intercept": self.intercept.tolist(),
            "residual_covariance": self.residual_covariance.tolist(),
            "t_eff": self.t_eff,
            "stable": self.stable,
            "max_companion_modulus": self.max_companion_modulus,
        }


@dataclass(frozen=True)
class MaCoefficients:
    """Moving-average matrices A_0 .. A_{H-1}; A_0 is the identity exactly."""

    horizon: int
    matrices: np.ndarray


def build_design(values: np.ndarray, p: int, include_intercept: bool) -> tuple[np.ndarray, np.ndarray]:
    """Lagged regression design for an (N, T) panel.

    Returns (X, Y): Y stacks the observations from t = p onward, X holds
    [1?, y_{t-1}, ..., y_{t-p}] row per observation.
    """
    y = values.T
    t, n = y.shape
    cols = (1 if include_intercept else 0) + n * p
    x = np.empty((t - p, cols))
    off = 0
    if include_intercept:
        x[:, 0] = 1.0
        off = 1
    for k in range(1, p + 1):
        x[:, off + (k - 1) * n: off + k * n] = y[p - k: t - k]
    return x, y[p:]


def fit_var(panel: VolatilityPanel, spec: VarSpec) -> VarModel:
    """Least-squares VAR fit on a volatility panel.

    Raises LengthError when the sample is too short and SingularDesignError
    when the design matrix is rank deficient (e.g. a constant panel). An
    unstable fit is flagged, not rejected.
    """
    values = panel.values
    n, t = values.shape
    p = spec.lag_order
    required = n * p + p + 10
    if t < required:
        raise LengthError(f"panel has {t} observations; VAR({p}) on {n} series needs >= {required}")
    x, y = build_design(values, p, spec.include_intercept)
    # x is reused for the residuals below, so the solver must not overwrite it.
    coef, _, rank, _ = scipy.linalg.lstsq(x, y, lapack_driver="gelsy", check_finite=False)
    if rank < x.shape[1]:
        raise SingularDesignError(
            f"design matrix rank {rank} < {x.shape[1]} regressors; "
            f"series {panel.series_ids[0]!r} equation (and all others) is unidentified")
    off = 1 if spec.include_intercept else 0
    intercept = coef[0].copy() if spec.include_intercept else np.zeros(n)
    phi = np.empty((p, n, n))
    for k in range(p):
        phi[k] = coef[off + k * n: off + (k + 1) * n].T
    resid = y - x @ coef
    t_eff = t - p
    cov = resid.T @ resid / t_eff
    cov = (cov + cov.T) / 2.0
    radius = companion_spectral_radius(phi)
    return VarModel(
        spec=spec,
        series_ids=panel.series_ids,
        coefficients=phi,
        intercept=intercept,
        residual_covariance=cov,
        t_eff=t_eff,
        stable=bool(radius < 1.0),
        max_companion_modulus=radius,
    )


def companion_matrix(coefficients: np.ndarray) -> np.ndarray:
    """Companion form of the lag polynomial: (N*p, N*p) block matrix."""
    p, n, _ = coefficients.shape
    top = np.concatenate(list(coefficients), axis=1)
    if p == 1:
        return top
    lower = np.hstack([np.eye(n * (p - 1)), np.zeros((n * (p - 1), n))])
    return np.vstack([top, lower])


def companion_spectral_radius(coefficients: np.ndarray) -> float:
    """Largest eigenvalue modulus of the companion matrix (< 1 iff stable)."""
    eigs = scipy.linalg.eigvals(companion_matrix(coefficients),
                                check_finite=False, overwrite_a=True)
    return float(np.abs(eigs).max())


def ma_coefficients(model: VarModel, horizon: int) -> MaCoefficients:
    """Moving-average matrices by the lag recursion A_i = sum_k Phi_k A_{i-k}.

    A_0 = I and A_i = 0 for i < 0; returns A_0 .. A_{horizon-1}. Each step is
    one wide product [Phi_1 .. Phi_p] @ [A_{i-1}; ..; A_{i-p}] with the lag
    sum folded into the inner axis (out-of-range lags contribute exact zeros).
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    phi = model.coefficients
    p, n, _ = phi.shape
    out = np.zeros((horizon, n, n))
    out[0] = np.eye(n)
    phi_wide = np.concatenate(list(phi), axis=1)
    stacked = np.zeros((p * n, n))
    work = np.empty((n, n, p * n))
    for i in range(1, horizon):
        for k in range(1, p + 1):
            stacked[(k - 1) * n: k * n] = out[i - k] if i - k >= 0 else 0.0
        out[i] = sorted_matmul(phi_wide, stacked, work=work)
    return MaCoefficients(horizon, out)


def simulate_var(coefficients: np.ndarray, intercept: np.ndarray, shocks: np.ndarray,
                 initial: np.ndarray | None = None) -> np.ndarray:
    """Propagate the VAR recursion over a (T, N) shock sequence.

    ``initial`` supplies the p pre-sample observations (rows oldest first);
    zeros when omitted. Returns an (N, T) panel matrix. With zero shocks this
    is the deterministic skeleton of the process.
    """
    p, n, _ = coefficients.shape
    shocks = np.asarray(shocks, dtype=float)
    t = shocks.shape[0]
    hist = np.zeros((p, n)) if initial is None else np.array(initial, dtype=float)
    if hist.shape != (p, n):
        raise ValueError(f"initial must have shape ({p}, {n})")
    out = np.empty((t, n))
    buf = list(hist)
    for step in range(t):
        y = intercept + shocks[step]
        for k in range(1, p + 1):
            y = y + coefficients[k - 1] @ buf[-k]
        out[step] = y
        buf.append(y)
        buf.pop(0)
    return out.T
