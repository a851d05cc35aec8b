"""Panel ingestion and per-series volatility statistics.

Loads OHLC index levels from CSV (long form, or wide form via a manifest),
aligns the series on their shared trading calendar, converts levels to natural
logs, and derives daily Garman-Klass variances plus the descriptive statistics
and unit-root diagnostics used to sanity-check a volatility panel.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    AlignmentError,
    DegenerateSeriesError,
    LengthError,
    ParseError,
    SingularDesignError,
    ValidationError,
)

LONG_HEADER = ["series_id", "date", "open", "high", "low", "close"]
MANIFEST_HEADER = ["series_id", "path"]
WIDE_HEADER = ["date", "open", "high", "low", "close"]

# Dickey-Fuller critical values, constant-only regression, asymptotic sample.
ADF_CRITICAL_VALUES = {0.01: -3.43, 0.05: -2.86, 0.10: -2.57}


@dataclass(frozen=True)
class IngestConfig:
    """Loader options; defaults reproduce the baseline pipeline."""

    already_log: bool = False
    exclusion_dates: tuple[dt.date, ...] = ()
    max_drop_fraction: float = 0.05
    adf_lag: int = 2


@dataclass(frozen=True)
class OhlcBar:
    """One day of log-prices. Invariant: low <= open, close <= high, all finite."""

    date: dt.date
    open: float
    high: float
    low: float
    close: float


@dataclass(frozen=True)
class OhlcPanel:
    """Rectangular panel of aligned log-price bars, one row per series."""

    series_ids: tuple[str, ...]
    calendar: tuple[dt.date, ...]
    open: np.ndarray
    high: np.ndarray
    low: np.ndarray
    close: np.ndarray
    exclusion_dates: frozenset[dt.date] = field(default_factory=frozenset)

    @property
    def n_series(self) -> int:
        return len(self.series_ids)

    @property
    def n_dates(self) -> int:
        return len(self.calendar)

    def bar(self, series_id: str, date: dt.date) -> OhlcBar:
        i = self.series_ids.index(series_id)
        t = self.calendar.index(date)
        return OhlcBar(date, self.open[i, t], self.high[i, t], self.low[i, t], self.close[i, t])


@dataclass(frozen=True)
class VolatilityPanel:
    """N x T matrix of daily variance estimates with exclusion dates removed."""

    series_ids: tuple[str, ...]
    dates: tuple[dt.date, ...]
    values: np.ndarray

    @property
    def n_series(self) -> int:
        return len(self.series_ids)

    @property
    def n_dates(self) -> int:
        return len(self.dates)

    def slice_dates(self, start: dt.date | None, end: dt.date | None) -> "VolatilityPanel":
        """Sub-panel with dates in [start, end] (inclusive; None = open end)."""
        keep = [t for t, d in enumerate(self.dates)
                if (start is None or d >= start) and (end is None or d <= end)]
        if not keep:
            from .errors import SliceError
            raise SliceError(f"date range {start}..{end} selects no observations")
        return VolatilityPanel(self.series_ids, tuple(self.dates[t] for t in keep),
                               self.values[:, keep])


@dataclass(frozen=True)
class DescriptiveStats:
    """Summary row for one volatility series (Pearson kurtosis, sample std)."""

    mean: float
    median: float
    max: float
    min: float
    std: float
    skewness: float
    kurtosis: float
    adf_statistic: float
    adf_significant_1pct: bool


@dataclass(frozen=True)
class LoadReport:
    """What the loader read, dropped and excluded."""

    source: str
    rows_read: int
    rows_dropped: int
    dates_dropped: int
    n_series: int
    n_dates: int
    exclusions_in_calendar: int
    negative_volatility_count: int | None = None

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "rows_read": self.rows_read,
            "rows_dropped": self.rows_dropped,
            "dates_dropped": self.dates_dropped,
            "n_series": self.n_series,
            "n_dates": self.n_dates,
            "exclusions_in_calendar": self.exclusions_in_calendar,
            "negative_volatility_count": self.negative_volatility_count,
        }


def gk_variance(open_, high, low, close):
    """Garman-Klass daily variance from log-prices (scalars or arrays).

    0.511 (H-L)^2 - 0.019 [(C-O)(H+L-2O) - 2(H-O)(L-O)] - 0.383 (C-O)^2

    Uses only differences of the four log-prices, so it is invariant under a
    common shift. Can go slightly negative on pathological bars; values are
    reported as-is (no flooring).
    """
    hl = high - low
    co = close - open_
    cross = co * (high + low - 2.0 * open_) - 2.0 * (high - open_) * (low - open_)
    return 0.511 * hl * hl - 0.019 * cross - 0.383 * co * co


def garman_klass(bar: OhlcBar) -> float:
    """Daily variance estimate for a single validated bar."""
    return float(gk_variance(bar.open, bar.high, bar.low, bar.close))


def panel_volatility(panel: OhlcPanel) -> VolatilityPanel:
    """Apply the Garman-Klass estimator element-wise and drop excluded dates."""
    values = gk_variance(panel.open, panel.high, panel.low, panel.close)
    keep = [t for t, d in enumerate(panel.calendar) if d not in panel.exclusion_dates]
    return VolatilityPanel(panel.series_ids,
                           tuple(panel.calendar[t] for t in keep),
                           values[:, keep])


def describe(series: np.ndarray, adf_lag: int = 2) -> DescriptiveStats:
    """Descriptive statistics plus the ADF unit-root statistic for one series.

    Raises LengthError when the series is shorter than adf_lag + 10 and
    DegenerateSeriesError for constant series (skewness/kurtosis undefined).
    """
    v = np.asarray(series, dtype=float)
    n = v.size
    if n < adf_lag + 10:
        raise LengthError(f"series length {n} < required {adf_lag + 10} for adf_lag={adf_lag}")
    centered = v - v.mean()
    m2 = float(np.mean(centered ** 2))
    if m2 == 0.0:
        raise DegenerateSeriesError("constant series: skewness and kurtosis are undefined")
    m3 = float(np.mean(centered ** 3))
    m4 = float(np.mean(centered ** 4))
    stat = adf_statistic(v, adf_lag)
    return DescriptiveStats(
        mean=float(v.mean()),
        median=float(np.median(v)),
        max=float(v.max()),
        min=float(v.min()),
        std=float(v.std(ddof=1)),
        skewness=m3 / m2 ** 1.5,
        kurtosis=m4 / m2 ** 2,
        adf_statistic=stat,
        adf_significant_1pct=bool(stat < ADF_CRITICAL_VALUES[0.01]),
    )


def adf_statistic(series: np.ndarray, lag: int) -> float:
    """Augmented Dickey-Fuller t-statistic, constant-only regression.

    Regresses the first difference on a constant, the lagged level, and `lag`
    lagged differences; the statistic is the t-ratio of the lagged level.
    """
    v = np.asarray(series, dtype=float)
    n = v.size
    dv = np.diff(v)
    rows = n - lag - 1
    k = lag + 2
    if rows <= k:
        raise LengthError(f"series length {n} leaves {rows} ADF observations for {k} regressors")
    y = dv[lag:]
    x = np.empty((rows, k))
    x[:, 0] = 1.0
    x[:, 1] = v[lag:-1]
    for j in range(1, lag + 1):
        x[:, 1 + j] = dv[lag - j:-j]
    coef, _, rank, _ = np.linalg.lstsq(x, y, rcond=None)
    if rank < k:
        raise SingularDesignError("ADF design matrix is rank deficient")
    resid = y - x @ coef
    s2 = float(resid @ resid) / (rows - k)
    xtx_inv = np.linalg.inv(x.T @ x)
    se = math.sqrt(s2 * xtx_inv[1, 1])
    return float(coef[1] / se)


def load_panel(source: str | Path, config: IngestConfig = IngestConfig()) -> tuple[OhlcPanel, LoadReport]:
    """Load and align an OHLC panel from a CSV file.

    The header decides the format: ``series_id,date,open,high,low,close`` is
    read as a long-form panel, ``series_id,path`` as a manifest of wide-form
    per-series files (``date,open,high,low,close``, paths relative to the
    manifest). Returns the rectangular panel together with a load report.
    """
    path = Path(source)
    with open(path, newline="") as fh:
        first = fh.readline()
    header = [c.strip() for c in first.strip().split(",")]
    if header == MANIFEST_HEADER:
        records, rows_read = _read_manifest(path)
    elif header == LONG_HEADER:
        with open(path, newline="") as fh:
            records, rows_read = _parse_long(fh, str(path))
    else:
        raise ParseError(f"{path}: line 1: unrecognized header {first.strip()!r}")
    return _assemble(records, rows_read, str(path), config)


def load_panel_text(text: str, config: IngestConfig = IngestConfig(),
                    name: str = "<inline>") -> tuple[OhlcPanel, LoadReport]:
    """Load a long-form panel from CSV text (the service's inline payload)."""
    records, rows_read = _parse_long(text.splitlines(), name)
    return _assemble(records, rows_read, name, config)


def load_panel_wide_texts(texts: dict[str, str], config: IngestConfig = IngestConfig(),
                          name: str = "<inline wide>") -> tuple[OhlcPanel, LoadReport]:
    """Load a panel from per-series wide-form CSV texts keyed by series id."""
    records = []
    rows_read = 0
    for sid, text in texts.items():
        recs, nrows = _parse_wide(text.splitlines(), sid, f"{name}:{sid}")
        records.extend(recs)
        rows_read += nrows
    return _assemble(records, rows_read, name, config)


def _read_manifest(path: Path):
    records = []
    rows_read = 0
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if lineno == 1 or not row:
                continue
            if len(row) != 2:
                raise ParseError(f"{path}: line {lineno}: expected 2 fields, got {len(row)}")
            sid, rel = row[0].strip(), row[1].strip()
            series_path = path.parent / rel
            if not series_path.exists():
                raise ParseError(f"{path}: line {lineno}: file not found: {series_path}")
            with open(series_path, newline="") as sfh:
                recs, nrows = _parse_wide(sfh, sid, str(series_path))
            records.extend(recs)
            rows_read += nrows
    return records, rows_read


def _parse_long(lines, name: str):
    records = []
    rows_read = 0
    for lineno, row in enumerate(csv.reader(lines), start=1):
        if not row:
            continue
        if lineno == 1:
            if [c.strip() for c in row] != LONG_HEADER:
                raise ParseError(f"{name}: line 1: expected header {','.join(LONG_HEADER)!r}")
            continue
        if len(row) != 6:
            raise ParseError(f"{name}: line {lineno}: expected 6 fields, got {len(row)}")
        sid = row[0].strip()
        records.append((sid,) + _parse_bar_fields(row[1:], name, lineno))
        rows_read += 1
    return records, rows_read


def _parse_wide(lines, sid: str, name: str):
    records = []
    rows_read = 0
    for lineno, row in enumerate(csv.reader(lines), start=1):
        if not row:
            continue
        if lineno == 1:
            if [c.strip() for c in row] != WIDE_HEADER:
                raise ParseError(f"{name}: line 1: expected header {','.join(WIDE_HEADER)!r}")
            continue
        if len(row) != 5:
            raise ParseError(f"{name}: line {lineno}: expected 5 fields, got {len(row)}")
        records.append((sid,) + _parse_bar_fields(row, name, lineno))
        rows_read += 1
    return records, rows_read


def _parse_bar_fields(fields, name: str, lineno: int):
    try:
        date = dt.date.fromisoformat(fields[0].strip())
    except ValueError as exc:
        raise ParseError(f"{name}: line {lineno}: bad date {fields[0]!r}: {exc}") from None
    try:
        o, h, l, c = (float(fields[j]) for j in range(1, 5))
    except ValueError as exc:
        raise ParseError(f"{name}: line {lineno}: bad number: {exc}") from None
    return date, o, h, l, c


def _assemble(records, rows_read: int, source: str,
              config: IngestConfig) -> tuple[OhlcPanel, LoadReport]:
    series_ids: list[str] = []
    per_series: dict[str, dict[dt.date, tuple]] = {}
    for sid, date, o, h, l, c in records:
        if sid not in per_series:
            series_ids.append(sid)
            per_series[sid] = {}
        if date in per_series[sid]:
            raise ParseError(f"{source}: duplicate bar for series {sid!r} on {date}")
        per_series[sid][date] = (o, h, l, c)

    if len(series_ids) < 2:
        raise ValidationError(f"{source}: panel needs at least 2 series, found {len(series_ids)}")
    date_sets = [set(per_series[sid]) for sid in series_ids]
    union = set().union(*date_sets)
    shared = set.intersection(*date_sets)
    if len(shared) < 10:
        raise ValidationError(f"{source}: panel needs at least 10 shared dates, found {len(shared)}")
    dropped_dates = len(union) - len(shared)
    drop_fraction = dropped_dates / len(union)
    if drop_fraction > config.max_drop_fraction:
        raise AlignmentError(
            f"{source}: alignment would drop {dropped_dates}/{len(union)} dates "
            f"({drop_fraction:.1%} > allowed {config.max_drop_fraction:.1%})")
    calendar = tuple(sorted(shared))
    rows_dropped = sum(len(per_series[sid]) - len(shared) for sid in series_ids)

    n, t = len(series_ids), len(calendar)
    opens = np.empty((n, t))
    highs = np.empty((n, t))
    lows = np.empty((n, t))
    closes = np.empty((n, t))
    for i, sid in enumerate(series_ids):
        bars = per_series[sid]
        for j, date in enumerate(calendar):
            o, h, l, c = bars[date]
            if not config.already_log:
                if min(o, h, l, c) <= 0.0:
                    raise ValidationError(
                        f"{source}: series {sid!r} on {date}: non-positive level cannot be logged")
                o, h, l, c = math.log(o), math.log(h), math.log(l), math.log(c)
            if not all(math.isfinite(x) for x in (o, h, l, c)):
                raise ValidationError(f"{source}: series {sid!r} on {date}: non-finite value")
            if not (l <= o <= h and l <= c <= h):
                raise ValidationError(
                    f"{source}: series {sid!r} on {date}: bar violates low <= open,close <= high")
            opens[i, j], highs[i, j], lows[i, j], closes[i, j] = o, h, l, c

    exclusions = frozenset(config.exclusion_dates)
    panel = OhlcPanel(tuple(series_ids), calendar, opens, highs, lows, closes, exclusions)
    report = LoadReport(
        source=source,
        rows_read=rows_read,
        rows_dropped=rows_dropped,
        dates_dropped=dropped_dates,
        n_series=n,
        n_dates=t,
        exclusions_in_calendar=sum(1 for d in calendar if d in exclusions),
    )
    return panel, report
