"""Spectral shift function laboratory.

Thin wrapper over the compiled core: identity and run reports come back as
plain dictionaries.
"""

import json

from ._core import (
    Potential,
    SsfLabError,
    bound_states,
    heat_coefficient,
    heat_invariant,
    heat_trace,
    invariant_tables,
    jost,
    pd_coefficient,
    phase_shift,
    resolvent_trace,
    ssf,
    ssf_coefficient,
    taylor_operator,
)
from . import _core

__all__ = [
    "Potential",
    "SsfLabError",
    "bound_states",
    "heat_coefficient",
    "heat_invariant",
    "heat_trace",
    "invariant_tables",
    "jost",
    "levinson",
    "pd_coefficient",
    "phase_shift",
    "resolvent_trace",
    "run_config",
    "ssf",
    "ssf_coefficient",
    "taylor_operator",
    "trace_identity",
]


def trace_identity(potential, n, half=False, tolerance=1e-4):
    """Integer-order (or, for d = 1, half-integer) trace identity report."""
    raw = _core._identity_half if half else _core._identity_integer
    return json.loads(raw(potential, n, tolerance))


def levinson(potential):
    return json.loads(_core._levinson(potential))


def run_config(config, write_files=False):
    """Run a config given as a dict or JSON text; returns exit status and reports."""
    text = config if isinstance(config, str) else json.dumps(config)
    return json.loads(_core._run(text, write_files))
