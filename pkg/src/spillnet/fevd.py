"""Generalized forecast-error variance decomposition.

Shares are computed without orthogonalizing the shocks, so they do not depend
on how the series are ordered; because the shock covariance is not diagonal
the raw rows need not sum to one and are row-normalized afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCovarianceError, DegenerateVarianceError
from .reductions import sorted_matmul, sorted_sum
from .var import VarModel, ma_coefficients


@dataclass(frozen=True)
class FevdMatrix:
    """Raw and row-normalized H-step variance-decomposition shares.

    ``normalized[i, j]`` is the fraction of series i's H-step forecast-error
    variance attributed to shocks in series j; each row sums to 1.
    """

    horizon: int
    raw: np.ndarray
    normalized: np.ndarray
    series_ids: tuple[str, ...]

    @property
    def n_series(self) -> int:
        return len(self.series_ids)


def gfevd(model: VarModel, horizon: int) -> FevdMatrix:
    """H-step generalized variance decomposition of a fitted VAR.

    For each pair (i, j) the share is

        raw[i, j] = sigma_jj^-1 * sum_h ((A_h Sigma)[i, j])^2
                    / sum_h (A_h Sigma A_h')[i, i]

    over h = 0 .. H-1, then rows are normalized to sum to 1. The products
    A_h Sigma are formed once per step and reused across all pairs.
    """
    return gfevd_multi(model, [horizon])[horizon]


def gfevd_multi(model: VarModel, horizons: list[int]) -> dict[int, FevdMatrix]:
    """Decompositions for several horizons in one pass.

    The numerator and denominator of the shares are prefix sums over steps,
    so all horizons share the moving-average recursion and the A_h Sigma
    products up to max(horizons). Every per-horizon result is bit-identical
    to a standalone :func:`gfevd` call at that horizon.
    """
    if not horizons:
        raise ValueError("horizons must be non-empty")
    if min(horizons) < 1:
        raise ValueError(f"horizon must be >= 1, got {min(horizons)}")
    sigma = model.residual_covariance
    diag = np.diag(sigma)
    bad = np.flatnonzero(diag <= 0.0)
    if bad.size:
        raise DegenerateCovarianceError(
            f"residual variance of series {model.series_ids[bad[0]]!r} is not positive")
    n = model.n_series
    hmax = max(horizons)
    ma = ma_coefficients(model, hmax).matrices
    prod = sorted_matmul(ma.reshape(hmax * n, n), sigma).reshape(hmax, n, n)
    squares = prod * prod
    inner = sorted_sum(prod * ma, axis=2, in_place=True)

    out: dict[int, FevdMatrix] = {}
    for h in sorted(set(horizons)):
        numer = squares[:h].sum(axis=0)
        denom = inner[:h].sum(axis=0)
        bad = np.flatnonzero(denom <= 0.0)
        if bad.size:
            raise DegenerateVarianceError(
                f"series {model.series_ids[bad[0]]!r} has zero forecast-error variance "
                f"at horizon {h}")
        raw = numer / denom[:, None] / diag[None, :]
        normalized = raw / sorted_sum(raw, axis=1)[:, None]
        out[h] = FevdMatrix(h, raw, normalized, model.series_ids)
    return out
