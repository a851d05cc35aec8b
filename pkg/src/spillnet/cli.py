"""Command-line client for the connectedness pipeline.

Thin by design: each subcommand assembles a request model, executes it either
in-process or against a running service (``--server``), and writes the files.
Defaults reproduce the baseline setup (lag 2, horizon 10, window 240, step 1),
so ``spillnet static data.csv`` needs no further flags.

Subcommands: describe, static, roll, sweep, serve.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

# All parallelism lives in the window fan-out (--threads); nested BLAS thread
# pools only add contention on small per-window problems. Respect explicit
# user settings.
for _var in ("OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "OMP_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import httpx

from . import output, runner
from .errors import SpillnetError
from .ingest import LONG_HEADER, MANIFEST_HEADER
from .schemas import (
    DateRange,
    DescribeRequest,
    DescribeResponse,
    PanelPayload,
    RollRequest,
    RollResponse,
    StaticRequest,
    StaticResponse,
    SweepRequest,
    SweepResponse,
)

CONFIG_ENV = "SPILLNET_CONFIG"

RUNNERS = {
    "describe": runner.run_describe,
    "static": runner.run_static,
    "roll": runner.run_roll,
    "sweep": runner.run_sweep,
}
RESPONSES = {
    "describe": DescribeResponse,
    "static": StaticResponse,
    "roll": RollResponse,
    "sweep": SweepResponse,
}


@dataclass
class RunConfig:
    """Effective settings after merging defaults, config file and flags."""

    input: str | None = None
    out: str = "spillnet_out"
    format: str = "csv"
    digits: int | None = None
    threads: int = 1
    server: str | None = None
    # ingest
    already_log: bool = False
    exclusion_dates: list[str] = field(default_factory=list)
    max_drop_fraction: float = 0.05
    adf_lag: int = 2
    # model
    lag: int = 2
    horizon: int = 10
    intercept: bool = True
    # rolling
    window: int = 240
    step: int = 1
    # sweep grid
    sweep_windows: list[int] = field(default_factory=lambda: [220, 240, 260])
    sweep_horizons: list[int] = field(default_factory=lambda: [5, 10, 15])
    sweep_lags: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    # networks
    damping: float = 0.85
    dot: bool = True
    subperiods: dict[str, tuple[str, str]] = field(default_factory=dict)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spillnet",
        description="Volatility-spillover connectedness toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, with_input: bool = True):
        if with_input:
            p.add_argument("input", nargs="?", help="long-form OHLC CSV or wide-form manifest")
        p.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
        p.add_argument("--out", help="output directory (default: spillnet_out)")
        p.add_argument("--format", choices=["csv", "json"], help="output format (default: csv)")
        p.add_argument("--digits", type=int, help="round printed numbers to N decimals "
                                                  "(default: full precision)")
        p.add_argument("--threads", type=int, help="worker threads for window fan-out")
        p.add_argument("--server", help="base URL of a running spillnet service; "
                                        "when set the command runs remotely")
        p.add_argument("--already-log", action="store_true", default=None,
                       help="input levels are already natural logs")
        p.add_argument("--exclude", action="append", metavar="DATE",
                       help="drop this date's volatilities (repeatable, ISO format)")
        p.add_argument("--max-drop-fraction", type=float,
                       help="calendar alignment tolerance (default 0.05)")

    p = sub.add_parser("describe", help="descriptive statistics and unit-root tests")
    common(p)
    p.add_argument("--adf-lag", type=int, help="augmented lag count for the ADF test (default 2)")

    p = sub.add_parser("static", help="full-sample connectedness table and network")
    common(p)
    p.add_argument("--lag", type=int, help="VAR lag order (default 2)")
    p.add_argument("--horizon", type=int, help="forecast horizon (default 10)")
    p.add_argument("--no-intercept", action="store_true", default=None,
                   help="fit the VAR without intercepts")
    p.add_argument("--subperiod", action="append", metavar="NAME=START:END",
                   help="also analyze this date slice (repeatable)")
    p.add_argument("--damping", type=float, help="PageRank damping factor (default 0.85)")
    p.add_argument("--dot", action=argparse.BooleanOptionalAction, default=None,
                   help="write the DOT network export (default on)")

    p = sub.add_parser("roll", help="rolling-window connectedness series")
    common(p)
    p.add_argument("--lag", type=int, help="VAR lag order (default 2)")
    p.add_argument("--horizon", type=int, help="forecast horizon (default 10)")
    p.add_argument("--window", type=int, help="window size in days (default 240)")
    p.add_argument("--step", type=int, help="window step in days (default 1)")
    p.add_argument("--no-intercept", action="store_true", default=None)

    p = sub.add_parser("sweep", help="parameter-grid robustness sweep")
    common(p)
    p.add_argument("--windows", help="comma-separated window sizes (default 220,240,260)")
    p.add_argument("--horizons", help="comma-separated horizons (default 5,10,15)")
    p.add_argument("--lags", help="comma-separated lag orders (default 1,2,3,4,5)")
    p.add_argument("--step", type=int, help="window step in days (default 1)")
    p.add_argument("--no-intercept", action="store_true", default=None)

    p = sub.add_parser("serve", help="run the HTTP service")
    common(p, with_input=False)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def load_config_file(path: str | None) -> dict:
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    with open(path) as fh:
        return json.load(fh)


def merge_config(args: argparse.Namespace) -> RunConfig:
    raw = load_config_file(args.config)
    cfg = RunConfig()
    ingest_raw = raw.get("ingest", {})
    cfg.already_log = bool(ingest_raw.get("already_log", cfg.already_log))
    cfg.exclusion_dates = list(ingest_raw.get("exclusion_dates", []))
    cfg.max_drop_fraction = float(ingest_raw.get("max_drop_fraction", cfg.max_drop_fraction))
    cfg.adf_lag = int(ingest_raw.get("adf_lag", cfg.adf_lag))
    for key in ("input", "out", "format", "digits", "threads", "server", "lag", "horizon",
                "window", "step", "damping"):
        if key in raw and raw[key] is not None:
            setattr(cfg, key, raw[key])
    if "intercept" in raw:
        cfg.intercept = bool(raw["intercept"])
    if "dot" in raw:
        cfg.dot = bool(raw["dot"])
    sweep_raw = raw.get("sweep", {})
    cfg.sweep_windows = list(sweep_raw.get("windows", cfg.sweep_windows))
    cfg.sweep_horizons = list(sweep_raw.get("horizons", cfg.sweep_horizons))
    cfg.sweep_lags = list(sweep_raw.get("lags", cfg.sweep_lags))
    for name, bounds in raw.get("subperiods", {}).items():
        cfg.subperiods[name] = (bounds[0], bounds[1])

    for attr in ("input", "out", "format", "digits", "threads", "server",
                 "max_drop_fraction", "adf_lag", "lag", "horizon", "window", "step",
                 "damping", "dot"):
        value = getattr(args, attr, None)
        if value is not None:
            setattr(cfg, attr, value)
    if getattr(args, "already_log", None):
        cfg.already_log = True
    if getattr(args, "exclude", None):
        cfg.exclusion_dates.extend(args.exclude)
    if getattr(args, "no_intercept", None):
        cfg.intercept = False
    if getattr(args, "windows", None):
        cfg.sweep_windows = [int(x) for x in args.windows.split(",")]
    if getattr(args, "horizons", None):
        cfg.sweep_horizons = [int(x) for x in args.horizons.split(",")]
    if getattr(args, "lags", None):
        cfg.sweep_lags = [int(x) for x in args.lags.split(",")]
    for spec in getattr(args, "subperiod", None) or []:
        name, _, bounds = spec.partition("=")
        start, _, end = bounds.partition(":")
        if not name or not start or not end:
            raise SpillnetError(f"--subperiod expects NAME=START:END, got {spec!r}")
        cfg.subperiods[name] = (start, end)
    return cfg


def build_payload(cfg: RunConfig) -> PanelPayload:
    """Panel source for the request: paths locally, file contents remotely."""
    if cfg.input is None:
        raise SpillnetError("no input file given (positional argument or config 'input')")
    exclusions = [dt.date.fromisoformat(d) for d in cfg.exclusion_dates]
    common = {"already_log": cfg.already_log, "exclusion_dates": exclusions,
              "max_drop_fraction": cfg.max_drop_fraction}
    path = Path(cfg.input)
    if cfg.server is None:
        return PanelPayload(csv_path=str(path), **common)
    with open(path, newline="") as fh:
        header = fh.readline().strip().split(",")
    if [c.strip() for c in header] == MANIFEST_HEADER:
        texts = {}
        for line in path.read_text().splitlines()[1:]:
            if not line.strip():
                continue
            sid, _, rel = line.partition(",")
            texts[sid.strip()] = (path.parent / rel.strip()).read_text()
        return PanelPayload(wide_texts=texts, **common)
    if [c.strip() for c in header] == LONG_HEADER:
        return PanelPayload(csv_text=path.read_text(), **common)
    raise SpillnetError(f"{path}: unrecognized header; expected long-form panel or manifest")


def dispatch(cfg: RunConfig, command: str, request):
    if cfg.server is None:
        return RUNNERS[command](request)
    url = cfg.server.rstrip("/") + "/" + command
    reply = httpx.post(url, json=request.model_dump(mode="json"), timeout=None)
    if reply.status_code != 200:
        detail = reply.json().get("detail", reply.text) if reply.content else reply.text
        raise SpillnetError(f"server returned {reply.status_code}: {detail}")
    return RESPONSES[command].model_validate(reply.json())


def cmd_describe(cfg: RunConfig) -> list[Path]:
    req = DescribeRequest(panel=build_payload(cfg), adf_lag=cfg.adf_lag)
    resp = dispatch(cfg, "describe", req)
    for warning in resp.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if cfg.format == "json":
        return [_write_json_result(resp, Path(cfg.out), "describe")]
    return output.write_describe(resp, Path(cfg.out), cfg.digits)


def cmd_static(cfg: RunConfig) -> list[Path]:
    payload = build_payload(cfg)
    written = []
    runs: list[tuple[Path, DateRange | None]] = [(Path(cfg.out), None)]
    for name, (start, end) in sorted(cfg.subperiods.items()):
        runs.append((Path(cfg.out) / f"subperiod_{name}",
                     DateRange(name=name, start=start, end=end)))
    for outdir, subperiod in runs:
        req = StaticRequest(panel=payload, lag=cfg.lag, horizon=cfg.horizon,
                            include_intercept=cfg.intercept, subperiod=subperiod,
                            damping=cfg.damping)
        resp = dispatch(cfg, "static", req)
        if cfg.format == "json":
            written.append(_write_json_result(resp, outdir, "static"))
        else:
            written.extend(output.write_static(resp, outdir, cfg.digits, dot=cfg.dot))
    return written


def cmd_roll(cfg: RunConfig) -> list[Path]:
    req = RollRequest(panel=build_payload(cfg), window=cfg.window, step=cfg.step,
                      lag=cfg.lag, horizon=cfg.horizon, include_intercept=cfg.intercept,
                      threads=cfg.threads)
    resp = dispatch(cfg, "roll", req)
    if resp.failures:
        print(f"warning: {len(resp.failures)} window(s) failed; see rolling_report.json",
              file=sys.stderr)
    if cfg.format == "json":
        return [_write_json_result(resp, Path(cfg.out), "roll")]
    return output.write_roll(resp, Path(cfg.out), cfg.digits)


def cmd_sweep(cfg: RunConfig) -> list[Path]:
    req = SweepRequest(panel=build_payload(cfg), windows=cfg.sweep_windows,
                       horizons=cfg.sweep_horizons, lags=cfg.sweep_lags, step=cfg.step,
                       include_intercept=cfg.intercept, threads=cfg.threads)
    resp = dispatch(cfg, "sweep", req)
    failed = [c for c in resp.combos if c.error is not None]
    if failed:
        print(f"warning: {len(failed)} combination(s) failed; see sweep_report.json",
              file=sys.stderr)
    if cfg.format == "json":
        return [_write_json_result(resp, Path(cfg.out), "sweep")]
    return output.write_sweep(resp, Path(cfg.out), cfg.digits)


def cmd_serve(cfg: RunConfig, host: str, port: int) -> None:
    import uvicorn

    from .service import app
    uvicorn.run(app, host=host, port=port)


def _write_json_result(resp, outdir: Path, command: str) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    path = outdir / f"{command}_result.json"
    path.write_text(resp.model_dump_json(indent=2) + "\n")
    return path


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = merge_config(args)
        if args.command == "serve":
            cmd_serve(cfg, args.host, args.port)
            return 0
        written = {"describe": cmd_describe, "static": cmd_static,
                   "roll": cmd_roll, "sweep": cmd_sweep}[args.command](cfg)
    except (SpillnetError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: request failed: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
