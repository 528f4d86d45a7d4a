"""Python front end for the finslerq C++ core."""

import json

from ._core import (
    FinslerqError,
    __version__,
    experiment_ids,
    index_of_symmetry,
    line_distance,
    slip_constant,
    verify,
)
from ._core import run_json as _run_json


def run(config):
    """Run an experiment from a config dict.

    Returns (record, tables, passed) where tables maps a table name to CSV text.
    """
    record, tables, passed = _run_json(json.dumps(config))
    return json.loads(record), dict(tables), passed


__all__ = [
    "FinslerqError",
    "__version__",
    "experiment_ids",
    "index_of_symmetry",
    "line_distance",
    "run",
    "slip_constant",
    "verify",
]
