"""Storm-centric cyclone diagnostics: tracking, balance analysis, reports."""

import json as _json

from . import _core
from ._core import (
    Dataset,
    Field,
    GridSpec,
    StormdiagError,
    bergerons,
    great_circle_km,
    load_dataset,
    solve_gradient_wind,
    truncate,
)

__all__ = [
    "Dataset",
    "Field",
    "GridSpec",
    "StormdiagError",
    "balance",
    "bergerons",
    "contour_export",
    "great_circle_km",
    "load_dataset",
    "run_report",
    "solve_gradient_wind",
    "synth",
    "track",
    "truncate",
]


def synth(case, params=None, out="."):
    """Write a synthetic fgrid dataset; returns the number of fields."""
    return _core.synth(case, _json.dumps(params or {}), str(out))


def track(dataset, first_guess, t0, t1, search_radius_km=900.0, window_h=24.0):
    return _json.loads(_core.track(str(dataset), list(first_guess), t0, t1, search_radius_km, window_h))


def balance(dataset, time, level=850.0, cyclone_velocity=(0.0, 0.0), truncation=106, smoothed=True, out=None):
    """Returns (fields, provenance): arrays keyed ws, wsg, curv, wsgr, wsdiff, gwmask."""
    fields, prov = _core.balance(str(dataset), time, level, list(cyclone_velocity), truncation, smoothed,
                                 None if out is None else str(out))
    return fields, _json.loads(prov)


def contour_export(values, grid, convention, variable="", units=""):
    return _json.loads(_core.contour_export(values, grid, convention, variable, units))


def run_report(config, out, base_dir=""):
    """Returns (failed_sources, summary)."""
    failed, summary = _core.run_report(_json.dumps(config), str(out), str(base_dir))
    return failed, _json.loads(summary)
