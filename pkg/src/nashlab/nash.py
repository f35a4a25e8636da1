"""Gauss map, Nash lift, and the tangent cones C3 and C4 at a base point."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InsufficientScales, NotInjective, NotOnVariety, SingularPoint, UnsupportedSpec
from .grassmannian import (
    NashPoint,
    Subspace,
    delta,
    pluecker_raw,
    sign_normalize,
    subspace_from_pluecker,
)
from .poly import format_polynomial
from .sampler import Branch, LocalProblem, ScaleLadder, _branches
from .variety import VarietySpec, complex_coords, realify

C4_CLUSTER_TOL = 0.05  # in delta
C3_CLUSTER_TOL = 1e-2  # radians
STABILITY_TOL = 1e-3  # allowed delta between the two last extrapolations
GRADIENT_RTOL = 1e-9


# Gauss map


def _implicit_tangent(spec: VarietySpec, point: np.ndarray) -> Subspace:
    grads = spec.equation.gradient()
    g = np.array([d.evaluate(list(point)) for d in grads], dtype=float)
    scale = np.linalg.norm([d.evaluate_abs(list(point)) for d in grads])
    norm = np.linalg.norm(g)
    if norm == 0 or norm <= GRADIENT_RTOL * scale:
        raise SingularPoint(f"gradient vanishes at {point.tolist()}")
    return Subspace.orthogonal_complement([g / norm])


def _complex_tangent(spec: VarietySpec, point: np.ndarray) -> Subspace:
    z = complex_coords(point, 2)
    fx, fy = spec.equation.gradient()
    gx, gy = fx.evaluate(z), fy.evaluate(z)
    absz = [abs(c) for c in z]
    scale = math.hypot(fx.evaluate_abs(absz), fy.evaluate_abs(absz))
    norm = math.hypot(abs(gx), abs(gy))
    if norm == 0 or norm <= GRADIENT_RTOL * scale:
        raise SingularPoint(f"complex gradient vanishes at {z}")
    v = np.array([-gy, gx]) / norm
    return Subspace.from_spanning([realify(v), realify(1j * v)])


def _graph_slope_line(slope: float) -> Subspace:
    if math.isinf(slope):
        return Subspace(np.array([[0.0, 1.0]]))
    return Subspace.from_spanning([[1.0, slope]])


def _graph_tangent(spec: VarietySpec, point: np.ndarray, graph_id: int | None) -> Subspace:
    x, y = float(point[0]), float(point[1])
    if graph_id is not None:
        return _graph_slope_line(spec.graphs[graph_id].slope(x))
    lines = []
    on_closure = False
    for g in spec.graphs:
        if g.on_closure(x) and abs(g.value(x) - y) <= 1e-9 * max(1.0, abs(y)):
            if g.contains(x):
                lines.append(_graph_slope_line(g.slope(x)))
            else:
                on_closure = True
    if not lines:
        if on_closure:
            raise SingularPoint(f"{[x, y]} is an endpoint of the graph family")
        raise NotOnVariety(f"{[x, y]} is on no graph")
    for other in lines[1:]:
        if delta(lines[0], other) > 1e-9 or on_closure:
            raise SingularPoint(f"several graphs with different tangents meet at {[x, y]}")
    if on_closure:
        raise SingularPoint(f"{[x, y]} is an endpoint of the graph family")
    return lines[0]


def tangent_space(spec: VarietySpec, point: Sequence[float], *, graph_id: int | None = None) -> Subspace:
    """T_p X at a regular point."""
    point = spec.check_point(point)
    if spec.kind == "region":
        return Subspace.full(spec.ambient_dim)
    if spec.kind == "implicit-real":
        return _implicit_tangent(spec, point)
    if spec.kind == "implicit-complex":
        return _complex_tangent(spec, point)
    return _graph_tangent(spec, point, graph_id)


def _local_tangent(local: VarietySpec, branch: Branch, k: int) -> Subspace:
    """Tangent at rung k of a branch, in local coordinates (points are already on the variety)."""
    p = branch.points[k]
    if local.kind == "implicit-real":
        return _implicit_tangent(local, p)
    if local.kind == "implicit-complex":
        return _complex_tangent(local, p)
    return _graph_tangent(local, p, branch.graph_id)


# limits along branches


def aitken(v0: np.ndarray, v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """Componentwise Aitken delta-squared step, skipped where the sequence is not geometric-like."""
    d1 = v1 - v0
    d2 = v2 - v1
    out = np.array(v2, dtype=float)
    for i in range(out.size):
        if d1[i] == 0 or abs(d2[i]) <= 1e-15 * abs(v2[i]):
            continue
        r = d2[i] / d1[i]
        if -1.0 < r < 0.95:
            out[i] = v2[i] + d2[i] * r / (1.0 - r)
    return out


def _aligned(vectors: list[np.ndarray]) -> list[np.ndarray]:
    out = [vectors[0]]
    for v in vectors[1:]:
        out.append(v if float(v @ out[-1]) >= 0 else -v)
    return out


@dataclass(frozen=True, eq=False)
class BranchLimit:
    branch: Branch
    tangent: Subspace
    variation: float  # delta between the two last extrapolations
    secant: np.ndarray  # extrapolated unit secant direction


def _branch_limit(local: VarietySpec, branch: Branch) -> BranchLimit:
    n, d = local.real_dim, local.set_dim
    tangents = [_local_tangent(local, branch, k) for k in range(len(branch.points))]
    pl = _aligned([sign_normalize(pluecker_raw(t.frame)) for t in tangents])
    sec = [p / np.linalg.norm(p) for p in branch.points]
    m = len(pl)
    if m >= 4:
        a1 = aitken(*pl[-4:-1])
        a2 = aitken(*pl[-3:])
        t1 = subspace_from_pluecker(a1, n, d)
        t2 = subspace_from_pluecker(a2, n, d)
        variation = delta(t1, t2)
    elif m == 3:
        t2 = subspace_from_pluecker(aitken(*pl), n, d)
        variation = delta(t2, tangents[-1])
    else:
        t2 = tangents[-1]
        variation = 0.0 if m == 1 else delta(tangents[-1], tangents[-2])
    s = aitken(*sec[-3:]) if len(sec) >= 3 else sec[-1]
    s = s / np.linalg.norm(s)
    return BranchLimit(branch, t2, variation, s)


def _limits(spec, point, ladder, seed) -> tuple[LocalProblem, list[BranchLimit]]:
    ladder = ladder or ScaleLadder.default()
    problem = LocalProblem.build(spec, point, seed=seed)
    branches = _branches(problem, ladder)
    if not branches:
        raise SingularPoint("no branches reach the base point")
    short = min(len(b.points) for b in branches)
    if short < 4:
        raise InsufficientScales(f"tangent limits need 4 rungs per branch, a branch has {short}")
    return problem, [_branch_limit(problem.local, b) for b in branches]


def cluster_subspaces(spaces: Sequence[Subspace], tol: float = C4_CLUSTER_TOL) -> list[Subspace]:
    reps: list[Subspace] = []
    for s in spaces:
        if all(delta(r, s) >= tol for r in reps):
            reps.append(s)
    return reps


def _ray_angle(a: np.ndarray, b: np.ndarray) -> float:
    return 2.0 * math.asin(min(1.0, float(np.linalg.norm(a - b)) / 2.0))


def cluster_rays(rays: Sequence[np.ndarray], tol: float = C3_CLUSTER_TOL) -> list[np.ndarray]:
    reps: list[np.ndarray] = []
    for r in rays:
        r = np.asarray(r, dtype=float)
        r = r / np.linalg.norm(r)
        if all(_ray_angle(q, r) >= tol for q in reps):
            reps.append(r)
    return reps


def compute_C4(spec: VarietySpec, point: Sequence[float], ladder: ScaleLadder | None = None, *, seed: int = 0) -> list[Subspace]:
    """Clustered limits of tangent spaces along every branch through ``point``."""
    if spec.kind == "region":
        spec.check_point(point)
        return [Subspace.full(spec.ambient_dim)]
    _, limits = _limits(spec, point, ladder, seed)
    _check_stable(limits)
    return cluster_subspaces([lim.tangent for lim in limits])


def _check_stable(limits: Sequence[BranchLimit]):
    worst = max(limits, key=lambda lim: lim.variation)
    if worst.variation > STABILITY_TOL:
        raise SingularPoint(
            f"tangent limit along branch {worst.branch.label} does not stabilize "
            f"(variation {worst.variation:.3g} > {STABILITY_TOL})"
        )


def _region_rays(problem: LocalProblem, scale: float) -> list[np.ndarray]:
    f = problem.local.equation
    if problem.local.ambient_dim != 2:
        raise UnsupportedSpec("region cones are sampled in the plane only")
    rays = []
    for a in np.arange(720) * (2 * math.pi / 720):
        v = np.array([math.cos(a), math.sin(a)])
        if f.evaluate(list(scale * v)) <= 0:
            rays.append(v)
    return rays


def compute_C3(
    spec: VarietySpec, point: Sequence[float], ladder: ScaleLadder | None = None, *, seed: int = 0
) -> tuple[list[np.ndarray], bool]:
    rays, linear, _ = _c3(spec, point, ladder, seed)
    return rays, linear


def _c3(spec, point, ladder, seed, limits=None):
    ladder = ladder or ScaleLadder.default()
    if spec.kind == "region":
        problem = LocalProblem(spec, spec.localize(point), np.asarray(point, float), None)
        raw = _region_rays(problem, ladder.scales[-1])
    else:
        if limits is None:
            _, limits = _limits(spec, point, ladder, seed)
        raw = [lim.secant for lim in limits]
    rays = cluster_rays(raw)
    span = _linear_span(rays, spec.set_dim)
    return rays, span is not None, span


def _linear_span(rays: Sequence[np.ndarray], d: int) -> Subspace | None:
    if not rays:
        return None
    for r in rays:
        if all(_ray_angle(q, -r) >= C3_CLUSTER_TOL for q in rays):
            return None
    m = np.array(rays)
    _, s, vt = np.linalg.svd(m)
    rank = int(np.sum(s > C3_CLUSTER_TOL * s[0]))
    if rank != d:
        return None
    return Subspace.from_spanning(vt[:d])


def nash_lift(spec: VarietySpec, point: Sequence[float], ladder: ScaleLadder | None = None, *, seed: int = 0) -> NashPoint:
    """The point of the Nash transformation over ``point`` (unique or an error)."""
    point = spec.check_point(point)
    try:
        return NashPoint(point, tangent_space(spec, point))
    except SingularPoint:
        pass
    _, limits = _limits(spec, point, ladder, seed)
    _check_stable(limits)  # unsettled limits must not be mistaken for distinct ones
    clusters = cluster_subspaces([lim.tangent for lim in limits])
    if len(clusters) > 1:
        raise NotInjective(
            f"tangent limits over {point.tolist()} split into {len(clusters)} subspaces",
            clusters,
        )
    return NashPoint(point, clusters[0])


@dataclass(frozen=True, eq=False)
class TangentConeReport:
    base: np.ndarray
    c3_rays: list
    c3_is_linear: bool
    c3_span: Subspace | None
    c4_spaces: list
    coincide_linearly: bool
    c3_c4_delta: float | None = None
    algebraic_cone: str | None = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "base": [float(v) for v in self.base],
            "c3_rays": [[float(v) for v in r] for r in self.c3_rays],
            "c3_is_linear": self.c3_is_linear,
            "c3_span": None if self.c3_span is None else self.c3_span.to_json(),
            "c4_spaces": [s.to_json() for s in self.c4_spaces],
            "coincide_linearly": self.coincide_linearly,
            "c3_c4_delta": self.c3_c4_delta,
            "algebraic_cone": self.algebraic_cone,
            "notes": list(self.notes),
        }


def algebraic_tangent_cone(spec: VarietySpec, point: Sequence[float]) -> str | None:
    """Initial form of the local equation, printed in the original variable names."""
    if spec.equation is None:
        return None
    local = spec.localize(point).equation
    if local.is_zero():
        return "0"
    return format_polynomial(local.homogeneous_part(local.min_degree), spec.variables)


def coincide_linearly(spec: VarietySpec, point: Sequence[float], ladder: ScaleLadder | None = None, *, seed: int = 0) -> TangentConeReport:
    point = spec.check_point(point)
    notes = []
    if spec.kind == "region":
        limits = None
        c4 = [Subspace.full(spec.ambient_dim)]
    else:
        _, limits = _limits(spec, point, ladder, seed)
        c4 = cluster_subspaces([lim.tangent for lim in limits])
        if len(c4) == 1:
            _check_stable(limits)
    rays, linear, span = _c3(spec, point, ladder, seed, limits)
    gap = None
    if len(c4) != 1:
        ok = True
        notes.append("C4 has several subspaces; the condition holds vacuously")
    else:
        if span is not None:
            gap = delta(span, c4[0])
        ok = linear and gap is not None and gap < C4_CLUSTER_TOL
    cone = algebraic_tangent_cone(spec, point) if spec.kind != "parametric-graphs" else None
    return TangentConeReport(point, rays, linear, span, c4, ok, gap, cone, notes)
