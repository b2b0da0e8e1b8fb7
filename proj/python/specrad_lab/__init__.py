"""Spectral-radius brackets and inequality checks on discrete group algebras."""

import json

from ._specrad import (
    BudgetExceeded,
    Error,
    InvalidInput,
    SchemaError,
    catalog_listing,
    catalog_names,
    circle_sup,
    experiment_kinds,
    growth_sizes,
    kesten_moments,
)
from ._specrad import run_config as _run_config

__all__ = [
    "BudgetExceeded",
    "Error",
    "InvalidInput",
    "SchemaError",
    "catalog_listing",
    "catalog_names",
    "circle_sup",
    "experiment_kinds",
    "growth_sizes",
    "kesten_moments",
    "run",
]


def run(config, jobs=1, base_dir="."):
    """Run a config (dict or JSON string). Returns (exit_code, list of report dicts)."""
    text = config if isinstance(config, str) else json.dumps(config)
    code, docs = _run_config(text, jobs, base_dir)
    return code, [json.loads(d) for d in docs]
