"""File writers for analysis results.

All writers take the wire models from :mod:`spillnet.schemas`, so files come
out identical whether the numbers were computed in-process or fetched from a
running service. Floats are written at full precision (shortest round-trip
representation) unless a fixed decimal count is requested; gaps are empty
cells.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .schemas import (
    DescribeResponse,
    RollResponse,
    StaticResponse,
    SweepResponse,
)

STATS_COLUMNS = ["mean", "median", "max", "min", "std", "skewness", "kurtosis",
                 "adf_statistic", "adf_significant_1pct"]


def fmt(value, digits: int | None = None) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if digits is None:
        return repr(float(value))
    return f"{float(value):.{digits}f}"


def write_describe(resp: DescribeResponse, outdir: Path, digits: int | None = None) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    stats_path = outdir / "descriptive_stats.csv"
    with open(stats_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["series_id"] + STATS_COLUMNS + ["degenerate"])
        for row in resp.stats:
            writer.writerow(
                [row.series_id]
                + [fmt(getattr(row, c), digits) for c in STATS_COLUMNS[:-1]]
                + [fmt(row.adf_significant_1pct), fmt(row.degenerate)])
    report_path = outdir / "load_report.json"
    _write_json(report_path, {"report": resp.report.model_dump(mode="json"),
                              "warnings": resp.warnings})
    return [stats_path, report_path]


def write_static(resp: StaticResponse, outdir: Path, digits: int | None = None,
                 dot: bool = True) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    ids = resp.series_ids
    written = []

    path = outdir / "connectedness.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["industry"] + ids + ["From"])
        for i, sid in enumerate(ids):
            row = [fmt(100.0 * v, digits) for v in resp.normalized[i]]
            writer.writerow([sid] + row + [fmt(resp.from_pct[i], digits)])
        writer.writerow(["To"] + [fmt(v, digits) for v in resp.to_pct]
                        + [fmt(resp.total_pct, digits)])
        writer.writerow(["Net"] + [fmt(v, digits) for v in resp.net_pct] + [""])
    written.append(path)

    path = outdir / "fevd_normalized.csv"
    _write_matrix(path, ids, resp.normalized, digits)
    written.append(path)

    path = outdir / "net_pairwise.csv"
    _write_matrix(path, ids, resp.net_pairwise, digits)
    written.append(path)

    path = outdir / "network_nodes.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "net_pct", "role", "pagerank"])
        for node in resp.nodes:
            writer.writerow([node.id, fmt(node.net_pct, digits), node.role,
                             fmt(node.pagerank, digits)])
    written.append(path)

    for name, edges in [("network_edges.csv", resp.edges),
                        ("max_out_edges.csv", resp.max_out_edges)]:
        path = outdir / name
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["source", "target", "weight_pct"])
            for e in edges:
                writer.writerow([e.source, e.target, fmt(e.weight_pct, digits)])
        written.append(path)

    if dot:
        path = outdir / "network.dot"
        path.write_text(render_dot(resp))
        written.append(path)

    path = outdir / "var_model.json"
    _write_json(path, resp.var_model.model_dump(mode="json"))
    written.append(path)

    path = outdir / "load_report.json"
    _write_json(path, resp.report.model_dump(mode="json"))
    written.append(path)
    return written


def render_dot(resp: StaticResponse) -> str:
    """DOT digraph; node size tracks |net| and color its sign (red=transmitter,
    blue=receiver), edge width tracks the pairwise weight."""
    max_net = max((abs(n.net_pct) for n in resp.nodes), default=0.0) or 1.0
    max_w = max((e.weight_pct for e in resp.edges), default=0.0) or 1.0
    lines = ["digraph spillover {", "  node [shape=circle, style=filled];"]
    for n in resp.nodes:
        color = "red" if n.role == "transmitter" else "blue"
        width = 0.3 + 1.7 * abs(n.net_pct) / max_net
        lines.append(
            f'  {_dot_id(n.id)} [fillcolor={color}, width={width:.4f}, '
            f'net_pct="{fmt(n.net_pct)}"];')
    for e in resp.edges:
        penwidth = 0.4 + 4.6 * e.weight_pct / max_w
        lines.append(
            f'  {_dot_id(e.source)} -> {_dot_id(e.target)} '
            f'[penwidth={penwidth:.4f}, weight_pct="{fmt(e.weight_pct)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_roll(resp: RollResponse, outdir: Path, digits: int | None = None) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    path = outdir / "rolling_total.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_end_date", "total_pct"])
        for date, value in zip(resp.window_end_dates, resp.total_pct):
            writer.writerow([date.isoformat(), fmt(value, digits)])
    written.append(path)

    for measure, series in [("from", resp.from_pct), ("to", resp.to_pct),
                            ("net", resp.net_pct)]:
        path = outdir / f"rolling_{measure}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["window_end_date"] + [f"{measure}_{sid}" for sid in resp.series_ids])
            for k, date in enumerate(resp.window_end_dates):
                writer.writerow([date.isoformat()] + [fmt(v, digits) for v in series[k]])
        written.append(path)

    path = outdir / "rolling_report.json"
    _write_json(path, {
        "report": resp.report.model_dump(mode="json"),
        "unstable_windows": [resp.window_end_dates[k].isoformat()
                             for k, flag in enumerate(resp.unstable) if flag],
        "failures": [f.model_dump(mode="json") for f in resp.failures],
    })
    written.append(path)
    return written


def write_sweep(resp: SweepResponse, outdir: Path, digits: int | None = None) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for combo in resp.combos:
        if combo.error is not None:
            continue
        path = outdir / f"sweep_total_W{combo.window}_H{combo.horizon}_p{combo.lag}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["window_end_date", "total_pct"])
            for date, value in zip(combo.window_end_dates, combo.total_pct):
                writer.writerow([date.isoformat(), fmt(value, digits)])
        written.append(path)

    path = outdir / "sweep_envelope.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "min", "median", "max"])
        for i, date in enumerate(resp.envelope_dates):
            writer.writerow([date.isoformat(), fmt(resp.envelope_min[i], digits),
                             fmt(resp.envelope_median[i], digits),
                             fmt(resp.envelope_max[i], digits)])
    written.append(path)

    path = outdir / "sweep_report.json"
    _write_json(path, {
        "report": resp.report.model_dump(mode="json"),
        "max_abs_deviation": resp.max_abs_deviation,
        "failures": [{"window": c.window, "horizon": c.horizon, "lag": c.lag,
                      "error": c.error} for c in resp.combos if c.error is not None],
    })
    written.append(path)
    return written


def _write_matrix(path: Path, ids: list[str], rows, digits: int | None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["series_id"] + ids)
        for sid, row in zip(ids, rows):
            writer.writerow([sid] + [fmt(v, digits) for v in row])


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _dot_id(name: str) -> str:
    escaped = name.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'
