"""Volatility-spillover connectedness analytics.

From OHLC panels to Garman-Klass volatilities, VAR estimation, generalized
forecast-error variance decomposition, connectedness tables, net pairwise
spillover networks with PageRank centrality, rolling-window dynamics and
parameter-robustness sweeps.
"""

__version__ = "0.1.0"

from .connect import (
    ConnectednessTable,
    NetPairwiseMatrix,
    connectedness,
    net_pairwise,
    rank,
)
from .fevd import FevdMatrix, gfevd
from .ingest import (
    DescriptiveStats,
    IngestConfig,
    LoadReport,
    OhlcBar,
    OhlcPanel,
    VolatilityPanel,
    describe,
    garman_klass,
    gk_variance,
    load_panel,
    panel_volatility,
)
from .netgraph import (
    PageRankScores,
    SpilloverNetwork,
    build_network,
    max_out_subgraph,
    pagerank,
)
from .rolling import (
    RollingConfig,
    RollingResult,
    SweepResult,
    roll,
    sweep,
)
from .var import (
    MaCoefficients,
    VarModel,
    VarSpec,
    fit_var,
    ma_coefficients,
    simulate_var,
)

__all__ = [
    "ConnectednessTable",
    "DescriptiveStats",
    "FevdMatrix",
    "IngestConfig",
    "LoadReport",
    "MaCoefficients",
    "NetPairwiseMatrix",
    "OhlcBar",
    "OhlcPanel",
    "PageRankScores",
    "RollingConfig",
    "RollingResult",
    "SpilloverNetwork",
    "SweepResult",
    "VarModel",
    "VarSpec",
    "VolatilityPanel",
    "build_network",
    "connectedness",
    "describe",
    "fit_var",
    "garman_klass",
    "gfevd",
    "gk_variance",
    "load_panel",
    "ma_coefficients",
    "max_out_subgraph",
    "net_pairwise",
    "pagerank",
    "panel_volatility",
    "rank",
    "roll",
    "simulate_var",
    "sweep",
]
