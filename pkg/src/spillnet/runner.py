"""Executes service requests against the core pipeline.

Both the FastAPI endpoints and the CLI's local mode call these functions, so
every entry point produces the same numbers from the same request.
"""

from __future__ import annotations

import math

import numpy as np

from . import connect, fevd, ingest, netgraph, rolling
from .errors import DegenerateSeriesError
from .schemas import (
    DescribeRequest,
    DescribeResponse,
    EdgeModel,
    LoadReportModel,
    NodeModel,
    RollRequest,
    RollResponse,
    SeriesStats,
    StaticRequest,
    StaticResponse,
    SweepComboModel,
    SweepRequest,
    SweepResponse,
    VarModelSummary,
    WindowFailureModel,
)
from .var import VarSpec, fit_var


def load_volatility(payload) -> tuple[ingest.VolatilityPanel, LoadReportModel]:
    """Ingest the payload, derive volatilities, and finish the load report."""
    config = ingest.IngestConfig(
        already_log=payload.already_log,
        exclusion_dates=tuple(payload.exclusion_dates),
        max_drop_fraction=payload.max_drop_fraction,
    )
    if payload.csv_text is not None:
        panel, report = ingest.load_panel_text(payload.csv_text, config)
    elif payload.csv_path is not None:
        panel, report = ingest.load_panel(payload.csv_path, config)
    elif payload.manifest_path is not None:
        panel, report = ingest.load_panel(payload.manifest_path, config)
    else:
        panel, report = ingest.load_panel_wide_texts(payload.wide_texts, config)
    vol = ingest.panel_volatility(panel)
    model = LoadReportModel(**{**report.to_dict(),
                               "negative_volatility_count": int((vol.values < 0).sum())})
    return vol, model


def _clean(value: float) -> float | None:
    return None if math.isnan(value) else float(value)


def _clean_list(values) -> list[float | None]:
    return [_clean(float(v)) for v in values]


def run_describe(req: DescribeRequest) -> DescribeResponse:
    vol, report = load_volatility(req.panel)
    stats: list[SeriesStats] = []
    warnings: list[str] = []
    for i, sid in enumerate(vol.series_ids):
        series = vol.values[i]
        try:
            d = ingest.describe(series, req.adf_lag)
        except DegenerateSeriesError:
            warnings.append(f"series {sid!r} is constant; higher moments undefined")
            stats.append(SeriesStats(
                series_id=sid,
                mean=float(series.mean()),
                median=float(np.median(series)),
                max=float(series.max()),
                min=float(series.min()),
                std=float(series.std(ddof=1)),
                degenerate=True,
            ))
            continue
        stats.append(SeriesStats(
            series_id=sid, mean=d.mean, median=d.median, max=d.max, min=d.min,
            std=d.std, skewness=d.skewness, kurtosis=d.kurtosis,
            adf_statistic=d.adf_statistic, adf_significant_1pct=d.adf_significant_1pct,
        ))
    return DescribeResponse(stats=stats, report=report, warnings=warnings)


def run_static(req: StaticRequest) -> StaticResponse:
    vol, report = load_volatility(req.panel)
    if req.subperiod is not None:
        vol = vol.slice_dates(req.subperiod.start, req.subperiod.end)
    model = fit_var(vol, VarSpec(req.lag, req.include_intercept))
    decomposition = fevd.gfevd(model, req.horizon)
    table = connect.connectedness(decomposition)
    npm = connect.net_pairwise(decomposition)
    network = netgraph.build_network(npm, table)
    scores = netgraph.pagerank(network, damping=req.damping, tol=req.pagerank_tol)
    subgraph = netgraph.max_out_subgraph(network)
    return StaticResponse(
        series_ids=list(vol.series_ids),
        horizon=req.horizon,
        normalized=decomposition.normalized.tolist(),
        from_pct=table.from_pct.tolist(),
        to_pct=table.to_pct.tolist(),
        net_pct=table.net_pct.tolist(),
        self_pct=table.self_pct.tolist(),
        total_pct=table.total_pct,
        net_pairwise=npm.values.tolist(),
        nodes=[NodeModel(id=n.id, net_pct=n.net_pct, role=n.role,
                         pagerank=scores.scores[n.id]) for n in network.nodes],
        edges=[EdgeModel(source=e.source, target=e.target, weight_pct=e.weight_pct)
               for e in network.edges],
        max_out_edges=[EdgeModel(source=e.source, target=e.target, weight_pct=e.weight_pct)
                       for e in subgraph.edges],
        pagerank_iterations=scores.iterations_used,
        var_model=VarModelSummary(**model.to_dict()),
        report=report,
    )


def run_roll(req: RollRequest) -> RollResponse:
    vol, report = load_volatility(req.panel)
    config = rolling.RollingConfig(window=req.window, step=req.step,
                                   var_spec=VarSpec(req.lag, req.include_intercept),
                                   horizon=req.horizon)
    result = rolling.roll(vol, config, threads=req.threads)
    return RollResponse(
        series_ids=list(result.series_ids),
        window_end_dates=list(result.window_end_dates),
        total_pct=_clean_list(result.total_pct),
        from_pct=[_clean_list(row) for row in result.from_pct],
        to_pct=[_clean_list(row) for row in result.to_pct],
        net_pct=[_clean_list(row) for row in result.net_pct],
        unstable=[bool(b) for b in result.unstable_flags],
        failures=[WindowFailureModel(index=f.index, end_date=f.end_date, error=f.error)
                  for f in result.failures],
        report=report,
    )


def run_sweep(req: SweepRequest) -> SweepResponse:
    vol, report = load_volatility(req.panel)
    result = rolling.sweep(vol, req.windows, req.horizons, req.lags,
                           step=req.step, include_intercept=req.include_intercept,
                           threads=req.threads)
    combos = []
    for e in result.entries:
        if e.result is None:
            combos.append(SweepComboModel(window=e.window, horizon=e.horizon, lag=e.lag,
                                          error=e.error))
        else:
            combos.append(SweepComboModel(
                window=e.window, horizon=e.horizon, lag=e.lag,
                window_end_dates=list(e.result.window_end_dates),
                total_pct=_clean_list(e.result.total_pct),
            ))
    return SweepResponse(
        combos=combos,
        envelope_dates=list(result.envelope_dates),
        envelope_min=result.envelope_min.tolist(),
        envelope_median=result.envelope_median.tolist(),
        envelope_max=result.envelope_max.tolist(),
        max_abs_deviation=result.max_abs_deviation,
        report=report,
    )
