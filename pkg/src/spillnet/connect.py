"""Connectedness measures aggregated from a normalized decomposition matrix.

Conventions (all public measures in percent, 0-100 scale):

- from-connectedness of series i = off-diagonal row sum, what i receives;
- to-connectedness of series i = off-diagonal column sum, what i transmits
  (a plain column sum, not a column-normalized ratio: the normalization is
  row-wise, so column ratios would not reproduce published to-values above
  100 percent);
- net = to - from; total = mean off-diagonal share.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fevd import FevdMatrix
from .reductions import sorted_sum

MEASURES = ("from", "to", "net")


@dataclass(frozen=True)
class ConnectednessTable:
    """From/to/net/total connectedness of one decomposition, in percent."""

    fevd: FevdMatrix
    from_pct: np.ndarray
    to_pct: np.ndarray
    net_pct: np.ndarray
    self_pct: np.ndarray
    total_pct: float

    @property
    def series_ids(self) -> tuple[str, ...]:
        return self.fevd.series_ids


@dataclass(frozen=True)
class NetPairwiseMatrix:
    """Positive part of the share differences, in percent.

    values[i, j] > 0 means series i receives more from j than it sends back;
    at most one direction of each pair is nonzero and the diagonal is zero.
    """

    values: np.ndarray
    series_ids: tuple[str, ...]


def connectedness(fevd: FevdMatrix) -> ConnectednessTable:
    """Aggregate a decomposition into from/to/net/total measures (percent)."""
    d = fevd.normalized
    n = d.shape[0]
    mask = ~np.eye(n, dtype=bool)
    # d[mask] flattens row-major: n-1 off-diagonal entries per row in turn.
    row_terms = d[mask].reshape(n, max(n - 1, 0))
    col_terms = d.T[mask].reshape(n, max(n - 1, 0))
    from_pct = 100.0 * sorted_sum(row_terms, axis=1, in_place=True)
    to_pct = 100.0 * sorted_sum(col_terms, axis=1, in_place=True)
    total = 100.0 * sorted_sum(d[mask], axis=0, in_place=True) / n
    return ConnectednessTable(
        fevd=fevd,
        from_pct=from_pct,
        to_pct=to_pct,
        net_pct=to_pct - from_pct,
        self_pct=100.0 * np.diag(d),
        total_pct=float(total),
    )


def net_pairwise(fevd: FevdMatrix) -> NetPairwiseMatrix:
    """Directed net shares: positive part of d[i,j] - d[j,i], in percent."""
    d = fevd.normalized
    diff = 100.0 * (d - d.T)
    values = np.where(diff > 0.0, diff, 0.0)
    np.fill_diagonal(values, 0.0)
    return NetPairwiseMatrix(values, fevd.series_ids)


def rank(table: ConnectednessTable, measure: str) -> list[tuple[str, float]]:
    """Series ranked by a connectedness measure, descending; ties break on id."""
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}, got {measure!r}")
    values = {"from": table.from_pct, "to": table.to_pct, "net": table.net_pct}[measure]
    pairs = list(zip(table.series_ids, (float(v) for v in values)))
    return sorted(pairs, key=lambda kv: (-kv[1], kv[0]))
