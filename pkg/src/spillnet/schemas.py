"""Request/response models for the analysis service.

These are the wire contracts: the FastAPI endpoints validate requests against
them and the CLI builds the same models, so a local run and a remote run go
through identical code. Matrices travel as nested lists; gaps (failed rolling
windows) are null, never NaN, to stay valid JSON.
"""

from __future__ import annotations

import datetime as dt

from pydantic import BaseModel, Field, model_validator


class PanelPayload(BaseModel):
    """Where the OHLC panel comes from, plus ingest options.

    Exactly one of ``csv_text`` (inline long-form CSV), ``csv_path`` /
    ``manifest_path`` (paths local to the process doing the work) or
    ``wide_texts`` (per-series wide-form CSV keyed by series id) must be set.
    """

    csv_text: str | None = None
    csv_path: str | None = None
    manifest_path: str | None = None
    wide_texts: dict[str, str] | None = None
    already_log: bool = False
    exclusion_dates: list[dt.date] = Field(default_factory=list)
    max_drop_fraction: float = 0.05

    @model_validator(mode="after")
    def _one_source(self):
        sources = [self.csv_text, self.csv_path, self.manifest_path, self.wide_texts]
        if sum(s is not None for s in sources) != 1:
            raise ValueError("exactly one of csv_text, csv_path, manifest_path, wide_texts required")
        return self


class LoadReportModel(BaseModel):
    source: str
    rows_read: int
    rows_dropped: int
    dates_dropped: int
    n_series: int
    n_dates: int
    exclusions_in_calendar: int
    negative_volatility_count: int | None = None


class SeriesStats(BaseModel):
    """One descriptive-statistics row; undefined moments of a degenerate
    (constant) series are null and the row is flagged."""

    series_id: str
    mean: float
    median: float
    max: float
    min: float
    std: float
    skewness: float | None = None
    kurtosis: float | None = None
    adf_statistic: float | None = None
    adf_significant_1pct: bool | None = None
    degenerate: bool = False


class DescribeRequest(BaseModel):
    panel: PanelPayload
    adf_lag: int = 2


class DescribeResponse(BaseModel):
    stats: list[SeriesStats]
    report: LoadReportModel
    warnings: list[str] = Field(default_factory=list)


class DateRange(BaseModel):
    name: str
    start: dt.date
    end: dt.date


class VarModelSummary(BaseModel):
    lag_order: int
    include_intercept: bool
    series_ids: list[str]
    coefficients: list[list[list[float]]]
    intercept: list[float]
    residual_covariance: list[list[float]]
    t_eff: int
    stable: bool
    max_companion_modulus: float


class NodeModel(BaseModel):
    id: str
    net_pct: float
    role: str
    pagerank: float


class EdgeModel(BaseModel):
    source: str
    target: str
    weight_pct: float


class StaticRequest(BaseModel):
    panel: PanelPayload
    lag: int = 2
    horizon: int = 10
    include_intercept: bool = True
    subperiod: DateRange | None = None
    damping: float = 0.85
    pagerank_tol: float = 1e-12


class StaticResponse(BaseModel):
    series_ids: list[str]
    horizon: int
    normalized: list[list[float]]
    from_pct: list[float]
    to_pct: list[float]
    net_pct: list[float]
    self_pct: list[float]
    total_pct: float
    net_pairwise: list[list[float]]
    nodes: list[NodeModel]
    edges: list[EdgeModel]
    max_out_edges: list[EdgeModel]
    pagerank_iterations: int
    var_model: VarModelSummary
    report: LoadReportModel


class RollRequest(BaseModel):
    panel: PanelPayload
    window: int = 240
    step: int = 1
    lag: int = 2
    horizon: int = 10
    include_intercept: bool = True
    threads: int = 1


class WindowFailureModel(BaseModel):
    index: int
    end_date: dt.date
    error: str


class RollResponse(BaseModel):
    series_ids: list[str]
    window_end_dates: list[dt.date]
    total_pct: list[float | None]
    from_pct: list[list[float | None]]
    to_pct: list[list[float | None]]
    net_pct: list[list[float | None]]
    unstable: list[bool]
    failures: list[WindowFailureModel]
    report: LoadReportModel


class SweepRequest(BaseModel):
    panel: PanelPayload
    windows: list[int] = Field(default_factory=lambda: [220, 240, 260])
    horizons: list[int] = Field(default_factory=lambda: [5, 10, 15])
    lags: list[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5])
    step: int = 1
    include_intercept: bool = True
    threads: int = 1


class SweepComboModel(BaseModel):
    window: int
    horizon: int
    lag: int
    window_end_dates: list[dt.date] | None = None
    total_pct: list[float | None] | None = None
    error: str | None = None


class SweepResponse(BaseModel):
    combos: list[SweepComboModel]
    envelope_dates: list[dt.date]
    envelope_min: list[float]
    envelope_median: list[float]
    envelope_max: list[float]
    max_abs_deviation: float | None
    report: LoadReportModel
