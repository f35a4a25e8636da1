"""JSON analysis reports.

Reports are plain dictionaries serialised with fixed key order and repr-exact
floats, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import __version__
from .nash import C3_CLUSTER_TOL, C4_CLUSTER_TOL, STABILITY_TOL
from .regularity import BILIP_GROWTH_TOL, BILIP_SLOPE_TOL, FIT_RUNGS, PointAnalysis

SCHEMA_VERSION = 1


def clean(value):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return clean(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return 0.0 if v == 0 else v
    return value


def dumps(doc: dict) -> str:
    return json.dumps(clean(doc), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def configuration(ladder, seed: int) -> dict:
    return {
        "ladder": list(ladder.scales),
        "seed": seed,
        "tolerances": {
            "c4_cluster_delta": C4_CLUSTER_TOL,
            "c3_cluster_radians": C3_CLUSTER_TOL,
            "limit_stability_delta": STABILITY_TOL,
            "bilip_ratio_slope": BILIP_SLOPE_TOL,
            "bilip_ratio_growth": BILIP_GROWTH_TOL,
            "fit_rungs": FIT_RUNGS,
        },
    }


def analysis_report(a: PointAnalysis) -> dict:
    parity = None
    if a.parity is not None:
        parity = {
            "parity": a.parity.parity,
            "fiber_counts": list(a.parity.counts),
            "fiber_values": list(a.parity.values),
            "dissenting_fibers": a.parity.dissent,
            "direction": list(a.parity.direction),
            "note": "majority over generic fibers; the exceptional set is not computed",
        }
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "spec": a.spec.to_document(),
        "base": [float(v) for v in a.base],
        "configuration": configuration(a.ladder, a.seed),
        "tangent_cones": None if a.cones is None else a.cones.to_json(),
        "multiplicity_mod2": parity,
        "branch_count": a.branch_count,
        "fits": {k: v.to_json() for k, v in a.fits.items()},
        "samples": {
            k: [
                {
                    "scale": s.scale,
                    "log_dist": s.log_dist,
                    "log_nash_dist": s.log_nash_dist,
                    "p": s.p,
                    "q": s.q,
                }
                for s in v
            ]
            for k, v in a.samples.items()
        },
        "verdict": a.verdict.to_json(),
        "notes": list(a.notes),
    }


def suite_report(rows, seed: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "seed": seed,
        "rows": [r.to_json() for r in rows],
        "all_passed": all(r.passed for r in rows),
    }
