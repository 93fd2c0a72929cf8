"""Finite-dimensional laboratory for quantum stochastic cocycles.

The compiled core exposes operator spaces, associated semigroup families,
cocycle kernels, and the property verifiers; verifier reports cross the
boundary as JSON text.  This package re-exports the core and adds small
conveniences for working with reports and configs as dicts.
"""

import json as _json

from qsclab._core import *  # noqa: F401,F403
from qsclab import _core as _core_module

__version__ = "0.1.0"


def report(text):
    """Parses a verifier report emitted by the core into a dict."""
    return _json.loads(text)


def run_config(config, seed=None):
    """Runs the suites of a config given as a dict or JSON text.

    Returns (exit_code, report_dict); exit codes follow the command line
    tool: 0 all pass, 1 conclusive failure, 3 inconclusive only.
    """
    text = config if isinstance(config, str) else _json.dumps(config)
    code, rep = _core_module.run_config_json(text, seed)
    return code, _json.loads(rep)
