import os

# Window-level threading is the package's parallelism; nested BLAS pools only
# thrash the small per-window problems (and subprocesses inherit this).
for _var in ("OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "OMP_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import csv
import datetime as dt
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from spillnet.fevd import FevdMatrix
from spillnet.ingest import VolatilityPanel
from spillnet.var import VarModel, VarSpec, companion_spectral_radius

FIXTURES = Path(__file__).parent / "fixtures"

# GK variance of a bar with close == open, high-open = 0.6*r, low-open = -0.4*r:
# 0.511*r^2 - 0.019*(-2*0.6*(-0.4))*r^2 = 0.50188*r^2. Inverting this lets the
# synthetic panels hit exact target variances.
GK_SHAPE_FACTOR = 0.50188


@dataclass(frozen=True)
class PublishedTable:
    """The transcribed 28-sector connectedness table (values in percent)."""

    ids: tuple[str, ...]
    matrix_pct: np.ndarray
    from_pct: np.ndarray
    to_pct: np.ndarray
    net_pct: np.ndarray
    total_pct: float

    def as_fevd(self) -> FevdMatrix:
        fractions = self.matrix_pct / 100.0
        return FevdMatrix(10, fractions, fractions, self.ids)


def load_published_table() -> PublishedTable:
    with open(FIXTURES / "sector28_table.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    ids = tuple(rows[0][1:-1])
    n = len(ids)
    matrix = np.array([[float(c) for c in rows[1 + i][1:1 + n]] for i in range(n)])
    from_pct = np.array([float(rows[1 + i][-1]) for i in range(n)])
    to_row = rows[1 + n]
    net_row = rows[2 + n]
    assert to_row[0] == "To" and net_row[0] == "Net"
    return PublishedTable(
        ids=ids,
        matrix_pct=matrix,
        from_pct=from_pct,
        to_pct=np.array([float(c) for c in to_row[1:1 + n]]),
        net_pct=np.array([float(c) for c in net_row[1:1 + n]]),
        total_pct=float(to_row[-1]),
    )


@pytest.fixture(scope="session")
def published_table() -> PublishedTable:
    return load_published_table()


def random_stable_model(rng: np.random.Generator, n: int, p: int,
                        target_radius: float = 0.85) -> VarModel:
    """Random VAR with companion spectral radius scaled below 1."""
    phi = rng.normal(scale=0.4 / math.sqrt(n), size=(p, n, n))
    radius = companion_spectral_radius(phi.copy())
    if radius >= target_radius:
        scale = target_radius / radius
        for k in range(p):
            phi[k] *= scale ** (k + 1)
        radius = companion_spectral_radius(phi.copy())
    a = rng.normal(size=(n, n))
    sigma = a @ a.T / n + 0.5 * np.eye(n)
    return VarModel(
        spec=VarSpec(p),
        series_ids=tuple(f"s{i:02d}" for i in range(n)),
        coefficients=phi,
        intercept=np.zeros(n),
        residual_covariance=sigma,
        t_eff=100,
        stable=bool(radius < 1.0),
        max_companion_modulus=radius,
    )


def make_dates(count: int, start: dt.date = dt.date(2015, 1, 1)) -> tuple[dt.date, ...]:
    return tuple(start + dt.timedelta(days=i) for i in range(count))


def variance_panel(rng: np.random.Generator, n: int, t: int,
                   common_loading: float = 0.8) -> VolatilityPanel:
    """Synthetic positive variance panel with a common AR(1) factor."""
    factor = np.zeros(t)
    for s in range(1, t):
        factor[s] = 0.9 * factor[s - 1] + rng.normal(scale=0.3)
    idio = np.zeros((n, t))
    for s in range(1, t):
        idio[:, s] = 0.5 * idio[:, s - 1] + rng.normal(scale=0.4, size=n)
    base = rng.uniform(-9.0, -8.0, size=n)
    values = np.exp(base[:, None] + common_loading * factor[None, :] + idio)
    return VolatilityPanel(tuple(f"s{i:02d}" for i in range(n)), make_dates(t), values)


def bars_for_variance(base_log: np.ndarray, variance: np.ndarray):
    """OHLC log-price bars whose Garman-Klass variance equals ``variance``."""
    spread = np.sqrt(variance / GK_SHAPE_FACTOR)
    o = base_log
    h = base_log + 0.6 * spread
    l = base_log - 0.4 * spread
    c = base_log.copy()
    return o, h, l, c


def write_long_csv(path: Path, ids, dates, opens, highs, lows, closes, log_levels=True):
    """Write a long-form OHLC CSV; log-price inputs are exponentiated."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["series_id", "date", "open", "high", "low", "close"])
        for i, sid in enumerate(ids):
            for t, date in enumerate(dates):
                o, h, l, c = opens[i, t], highs[i, t], lows[i, t], closes[i, t]
                if log_levels:
                    o, h, l, c = math.exp(o), math.exp(h), math.exp(l), math.exp(c)
                writer.writerow([sid, date.isoformat(),
                                 repr(o), repr(h), repr(l), repr(c)])


def synthetic_ohlc_panel_csv(path: Path, n: int, t: int, seed: int,
                             regime_split: float | None = None,
                             quiet_loading: float = 0.0,
                             loud_loading: float = 1.2) -> None:
    """Synthetic OHLC panel whose GK variances follow a factor structure.

    With ``regime_split`` the common-factor loading jumps from quiet to loud
    at that fraction of the sample, which shifts connectedness mid-panel.
    """
    rng = np.random.default_rng(seed)
    loading = np.full(t, loud_loading)
    if regime_split is not None:
        loading[: int(t * regime_split)] = quiet_loading
    factor = np.zeros(t)
    for s in range(1, t):
        factor[s] = 0.9 * factor[s - 1] + rng.normal(scale=0.3)
    idio = np.zeros((n, t))
    for s in range(1, t):
        idio[:, s] = 0.5 * idio[:, s - 1] + rng.normal(scale=0.4, size=n)
    base = rng.uniform(-9.5, -8.5, size=n)
    variance = np.exp(base[:, None] + loading[None, :] * factor[None, :] + idio)
    walk = np.cumsum(rng.normal(scale=0.01, size=(n, t)), axis=1) + rng.uniform(2.0, 4.0, size=(n, 1))
    o, h, l, c = bars_for_variance(walk, variance)
    ids = tuple(f"s{i:02d}" for i in range(n))
    write_long_csv(path, ids, make_dates(t, dt.date(2000, 1, 4)), o, h, l, c)


@pytest.fixture(scope="session")
def small_panel_csv(tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("data") / "panel3x400.csv"
    synthetic_ohlc_panel_csv(path, n=3, t=400, seed=7)
    return path


@pytest.fixture(scope="session")
def acceptance_panel_csv(tmp_path_factory) -> Path:
    """The 28-series, 4800-day synthetic panel used by the scale criteria."""
    path = tmp_path_factory.mktemp("data") / "panel28x4800.csv"
    synthetic_ohlc_panel_csv(path, n=28, t=4800, seed=2024)
    return path
