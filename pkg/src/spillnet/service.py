"""FastAPI service exposing the connectedness pipeline.

Panels arrive inline (CSV text) or as paths local to the server process;
responses are the models from :mod:`spillnet.schemas`. Domain errors map to
HTTP 422 with the error message as detail.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__, runner
from .errors import SpillnetError
from .schemas import (
    DescribeRequest,
    DescribeResponse,
    RollRequest,
    RollResponse,
    StaticRequest,
    StaticResponse,
    SweepRequest,
    SweepResponse,
)

app = FastAPI(
    title="spillnet",
    description="Volatility-spillover connectedness analytics",
    version=__version__,
)


def _run(fn, req):
    try:
        return fn(req)
    except SpillnetError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except FileNotFoundError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/describe", response_model=DescribeResponse)
def describe(req: DescribeRequest):
    return _run(runner.run_describe, req)


@app.post("/static", response_model=StaticResponse)
def static(req: StaticRequest):
    return _run(runner.run_static, req)


@app.post("/roll", response_model=RollResponse)
def roll(req: RollRequest):
    return _run(runner.run_roll, req)


@app.post("/sweep", response_model=SweepResponse)
def sweep(req: SweepRequest):
    return _run(runner.run_sweep, req)
