"""Curvature and conformal invariants of four-manifolds with boundary."""

import json

from ._core import (
    Curvature,
    Error,
    InvariantReport,
    Model,
    __version__,
    bach,
    catalog_names,
    command_names,
    curvature,
    invariants,
    load_model,
    parse_model_json,
    run_command,
)


def run(command, model, **options):
    """Runs a CLI command and returns its report as a dict."""
    text, _ = run_command(command, model, **options)
    return json.loads(text)


__all__ = [
    "Curvature",
    "Error",
    "InvariantReport",
    "Model",
    "__version__",
    "bach",
    "catalog_names",
    "command_names",
    "curvature",
    "invariants",
    "load_model",
    "parse_model_json",
    "run",
    "run_command",
]
