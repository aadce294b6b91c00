"""Half-space depth, Cramer transforms and random polytope experiments."""

import json as _json

from ._core import (
    DepthlabError,
    Measure,
    __version__,
    catalog,
    config_hash,
    cramer,
    criteria,
    depth,
    depth_1d,
    expected_depth,
    expected_measure,
    hull_contains,
    log_laplace,
    parse_config,
    set_threads,
    threads,
)
from ._core import run as _run


def run(config_text, out=None):
    """Run an experiment config; returns the summary record as a dict."""
    return _json.loads(_run(config_text, out))


__all__ = [
    "DepthlabError",
    "Measure",
    "__version__",
    "catalog",
    "config_hash",
    "cramer",
    "criteria",
    "depth",
    "depth_1d",
    "expected_depth",
    "expected_measure",
    "hull_contains",
    "log_laplace",
    "parse_config",
    "run",
    "set_threads",
    "threads",
]
