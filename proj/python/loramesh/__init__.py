"""Python front end for the loramesh simulator."""

import json
from os import PathLike

from . import _core
from ._core import ConfigError, airtime, case1_triggers, case2_triggers, estimate_distance, received_power

__all__ = [
    "ConfigError",
    "airtime",
    "case1_triggers",
    "case2_triggers",
    "compare",
    "estimate_distance",
    "loadtest",
    "plan",
    "received_power",
    "simulate",
]


def simulate(scenario: str | PathLike, seed: int = 1, protocol: str = "", packets: int = -1,
             with_trace: bool = False) -> dict:
    """Run one scenario; returns metrics plus the trace digest (and trace lines if asked)."""
    out = _core.simulate(str(scenario), seed, protocol, packets, with_trace)
    out["metrics"] = json.loads(out["metrics"])
    if with_trace:
        out["trace"] = [json.loads(line) for line in out["trace"].splitlines()]
    return out


def plan(reports: dict) -> dict:
    return json.loads(_core.plan(json.dumps(reports)))


def compare(scenario: str | PathLike, seeds=(), packets: int = -1, jobs: int = 0) -> dict:
    return json.loads(_core.compare(str(scenario), list(seeds), packets, jobs))


def loadtest(scenario: str | PathLike, intervals, budgets, protocol: str = "", seed: int = 1,
             threshold: float = 1.2, jobs: int = 0) -> dict:
    return json.loads(_core.loadtest(str(scenario), protocol, list(intervals), list(budgets), seed,
                                     threshold, jobs))
