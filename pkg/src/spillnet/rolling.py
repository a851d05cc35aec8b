"""Rolling-window connectedness and parameter-grid robustness sweeps.

Each window re-runs fit -> decompose -> aggregate from scratch. Windows are
independent work items: they may execute on a thread pool in any order, and
results are written back by window index, so output does not depend on the
schedule. A window whose fit fails is recorded as a gap (NaN), never filled.

The sweep groups grid combinations by (window, lag): those share the per
window VAR fit, and the decomposition at several horizons shares its prefix
sums, so the grouped run produces bit-identical numbers to running every
combination on its own.
"""

from __future__ import annotations

import datetime as dt
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .connect import connectedness
from .errors import LengthError, SpillnetError
from .fevd import gfevd_multi
from .ingest import VolatilityPanel
from .var import VarSpec, fit_var


@dataclass(frozen=True)
class RollingConfig:
    """Window geometry and per-window model parameters."""

    window: int
    step: int = 1
    var_spec: VarSpec = field(default_factory=lambda: VarSpec(2))
    horizon: int = 10

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.step < 1:
            raise ValueError(f"step must be >= 1, got {self.step}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")


@dataclass(frozen=True)
class WindowFailure:
    """A window whose fit raised; its slots in the series stay NaN."""

    index: int
    end_date: dt.date
    error: str


@dataclass(frozen=True)
class RollingResult:
    """Per-window connectedness series, labelled by window end date.

    ``total_pct`` has one entry per window; ``from_pct``/``to_pct``/``net_pct``
    are (windows, N). Failed windows hold NaN and appear in ``failures``.
    """

    config: RollingConfig
    series_ids: tuple[str, ...]
    window_end_dates: tuple[dt.date, ...]
    total_pct: np.ndarray
    from_pct: np.ndarray
    to_pct: np.ndarray
    net_pct: np.ndarray
    unstable_flags: np.ndarray
    failures: tuple[WindowFailure, ...]

    @property
    def n_windows(self) -> int:
        return len(self.window_end_dates)


@dataclass(frozen=True)
class SweepEntry:
    """One (window, horizon, lag) combination of a sweep."""

    window: int
    horizon: int
    lag: int
    result: RollingResult | None
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    """All grid combinations plus the per-date envelope of total connectedness.

    The envelope is taken over the union of window end dates: at each date the
    min/median/max run over the combinations that produced a value there.
    ``max_abs_deviation`` is the largest spread (max - min) across the dates
    where every combination has a value; None when no such date exists.
    """

    entries: tuple[SweepEntry, ...]
    envelope_dates: tuple[dt.date, ...]
    envelope_min: np.ndarray
    envelope_median: np.ndarray
    envelope_max: np.ndarray
    max_abs_deviation: float | None


def window_count(n_dates: int, window: int, step: int) -> int:
    return (n_dates - window) // step + 1


def roll(panel: VolatilityPanel, config: RollingConfig, threads: int = 1) -> RollingResult:
    """Run the full pipeline over sliding windows of the panel.

    Window k covers observations [k*step, k*step + window) and is labelled by
    its final date. ``threads`` sizes a worker-process pool over the windows;
    results are assembled by window index and identical for any worker count.
    """
    grouped = _roll_grouped(panel, config.window, config.step, config.var_spec,
                            [config.horizon], threads)
    return grouped[config.horizon]


def _window_outputs(panel: VolatilityPanel, window: int, step: int, var_spec: VarSpec,
                    horizons: list[int], k: int):
    """One window's measures: (k, error, unstable, {h: (total, from, to, net)})."""
    start = k * step
    sub = VolatilityPanel(panel.series_ids,
                          panel.dates[start:start + window],
                          panel.values[:, start:start + window])
    try:
        model = fit_var(sub, var_spec)
        decomps = gfevd_multi(model, horizons)
    except SpillnetError as exc:
        return k, str(exc), False, None
    measures = {}
    for h in horizons:
        table = connectedness(decomps[h])
        measures[h] = (table.total_pct, table.from_pct, table.to_pct, table.net_pct)
    return k, None, not model.stable, measures


_POOL_STATE: dict = {}


def _pool_init(panel, window, step, var_spec, horizons):
    _POOL_STATE["args"] = (panel, window, step, var_spec, horizons)


def _pool_chunk(bounds):
    panel, window, step, var_spec, horizons = _POOL_STATE["args"]
    return [_window_outputs(panel, window, step, var_spec, horizons, k)
            for k in range(*bounds)]


def _roll_grouped(panel: VolatilityPanel, window: int, step: int, var_spec: VarSpec,
                  horizons: list[int], threads: int) -> dict[int, RollingResult]:
    """Roll once, decomposing every window at each requested horizon."""
    n, t = panel.values.shape
    if t < window:
        raise LengthError(f"panel has {t} observations, window needs {window}")
    required = n * var_spec.lag_order + var_spec.lag_order + 10
    if window < required:
        raise LengthError(
            f"window {window} too small for VAR({var_spec.lag_order}) on {n} series "
            f"(needs >= {required})")
    count = window_count(t, window, step)
    end_dates = tuple(panel.dates[k * step + window - 1] for k in range(count))
    wanted = sorted(set(horizons))

    total = {h: np.full(count, np.nan) for h in wanted}
    from_pct = {h: np.full((count, n), np.nan) for h in wanted}
    to_pct = {h: np.full((count, n), np.nan) for h in wanted}
    net_pct = {h: np.full((count, n), np.nan) for h in wanted}
    unstable = {h: np.zeros(count, dtype=bool) for h in wanted}
    failures: list[WindowFailure] = []

    def record(outcome):
        k, error, window_unstable, measures = outcome
        if error is not None:
            failures.append(WindowFailure(k, end_dates[k], error))
            return
        for h in wanted:
            t_pct, f_pct, to_vec, net_vec = measures[h]
            total[h][k] = t_pct
            from_pct[h][k] = f_pct
            to_pct[h][k] = to_vec
            net_pct[h][k] = net_vec
            unstable[h][k] = window_unstable

    if threads > 1 and count > 1:
        chunk = max(1, -(-count // (threads * 8)))
        bounds = [(lo, min(lo + chunk, count)) for lo in range(0, count, chunk)]
        with ProcessPoolExecutor(max_workers=threads, initializer=_pool_init,
                                 initargs=(panel, window, step, var_spec, wanted)) as pool:
            for outcomes in pool.map(_pool_chunk, bounds):
                for outcome in outcomes:
                    record(outcome)
        failures.sort(key=lambda f: f.index)
    else:
        for k in range(count):
            record(_window_outputs(panel, window, step, var_spec, wanted, k))

    shared_failures = tuple(failures)
    return {
        h: RollingResult(
            config=RollingConfig(window=window, step=step, var_spec=var_spec, horizon=h),
            series_ids=panel.series_ids,
            window_end_dates=end_dates,
            total_pct=total[h],
            from_pct=from_pct[h],
            to_pct=to_pct[h],
            net_pct=net_pct[h],
            unstable_flags=unstable[h],
            failures=shared_failures,
        )
        for h in wanted
    }


def sweep(panel: VolatilityPanel, windows: list[int], horizons: list[int], lags: list[int],
          step: int = 1, include_intercept: bool = True, threads: int = 1) -> SweepResult:
    """Roll once per (window, horizon, lag) combination and envelope the totals.

    A combination that fails outright is recorded with its error and skipped;
    the rest of the grid still runs.
    """
    grouped: dict[tuple[int, int], dict[int, RollingResult] | str] = {}
    for w in windows:
        for p in lags:
            try:
                grouped[(w, p)] = _roll_grouped(panel, w, step,
                                                VarSpec(p, include_intercept),
                                                list(horizons), threads)
            except SpillnetError as exc:
                grouped[(w, p)] = str(exc)

    entries: list[SweepEntry] = []
    for w in windows:
        for h in horizons:
            for p in lags:
                group = grouped[(w, p)]
                if isinstance(group, str):
                    entries.append(SweepEntry(w, h, p, None, group))
                else:
                    entries.append(SweepEntry(w, h, p, group[h]))

    by_date: dict[dt.date, list[float]] = {}
    complete = [e for e in entries if e.result is not None]
    for e in complete:
        for date, value in zip(e.result.window_end_dates, e.result.total_pct):
            if np.isfinite(value):
                by_date.setdefault(date, []).append(float(value))
    dates = tuple(sorted(by_date))
    env_min = np.array([min(by_date[d]) for d in dates])
    env_median = np.array([float(np.median(by_date[d])) for d in dates])
    env_max = np.array([max(by_date[d]) for d in dates])
    spread = [env_max[i] - env_min[i] for i, d in enumerate(dates)
              if len(by_date[d]) == len(complete)]
    max_dev = float(max(spread)) if spread else None
    return SweepResult(tuple(entries), dates, env_min, env_median, env_max, max_dev)
