"""Numerical experiments with Nash blowups of curve singularities.

Tangent cones, the inverse Nash mapping's modulus of continuity, and
regularity verdicts for plane curves, complex curves, graph families and
semialgebraic regions.
"""

__version__ = "0.1.0"

from .errors import NashLabError  # noqa: E402
from .grassmannian import Subspace, delta, hausdorff_delta_oracle, pluecker, subspace_from_pluecker  # noqa: E402
from .nash import coincide_linearly, compute_C3, compute_C4, nash_lift, tangent_space  # noqa: E402
from .regularity import analyze, classify, classify_set, fit_modulus, sample_pairs  # noqa: E402
from .sampler import ScaleLadder, multiplicity_mod2, sample_branches  # noqa: E402
from .variety import VarietySpec  # noqa: E402

__all__ = [
    "NashLabError",
    "ScaleLadder",
    "Subspace",
    "VarietySpec",
    "analyze",
    "classify",
    "classify_set",
    "coincide_linearly",
    "compute_C3",
    "compute_C4",
    "delta",
    "fit_modulus",
    "hausdorff_delta_oracle",
    "multiplicity_mod2",
    "nash_lift",
    "pluecker",
    "sample_branches",
    "sample_pairs",
    "subspace_from_pluecker",
    "tangent_space",
]
