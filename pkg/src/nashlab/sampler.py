"""Sampling a variety near a base point.

Points are produced fiber by fiber: a linear projection is chosen that is
transversal to the tangent cone, each fiber is solved exactly (real implicit
curves), with polished companion-matrix roots (complex curves) or by direct
evaluation (graph families), and fiber points at successive scales are chained
into branches.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import roots as _roots
from .errors import (
    BranchPairingAmbiguous,
    DegenerateFiber,
    DegenerateFiberWarning,
    InconsistentParity,
    NonTransversalProjection,
    UnsupportedSpec,
)
from .variety import VarietySpec, realify

DEFAULT_WINDOW = 0.5
COMPLEX_RAY_OFFSET = 0.3  # angle of the first sampling ray in the projected complex line
PAIRING_MARGIN = 1.1  # second-best continuation must be this much farther than the best


@dataclass(frozen=True)
class ScaleLadder:
    """Strictly decreasing positive scales t_j."""

    scales: tuple[float, ...]

    def __post_init__(self):
        s = tuple(float(v) for v in self.scales)
        if not s or any(v <= 0 for v in s) or any(b >= a for a, b in zip(s, s[1:])):
            raise ValueError("ladder scales must be positive and strictly decreasing")
        object.__setattr__(self, "scales", s)

    @classmethod
    def default(cls, count: int = 12, top: float = 0.1) -> "ScaleLadder":
        return cls(tuple(top * 2.0**-j for j in range(count)))

    @classmethod
    def between(cls, top: float, bottom: float, ratio: float = 0.5) -> "ScaleLadder":
        out = [top]
        while out[-1] * ratio >= bottom * (1 - 1e-12):
            out.append(out[-1] * ratio)
        return cls(tuple(out))

    def __len__(self):
        return len(self.scales)

    def __iter__(self):
        return iter(self.scales)


@dataclass(frozen=True, eq=False)
class Fiber:
    projection_direction: np.ndarray
    value: complex | float
    points: np.ndarray  # (k, real_dim)
    coords: np.ndarray  # position along the fiber (complex for complex curves)
    graph_ids: tuple = ()
    degenerate: tuple = ()  # coordinates of repeated roots, if any

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class Branch:
    """One continued component: a point per ladder rung, in local coordinates."""

    side: int
    label: str
    scales: tuple[float, ...]
    points: np.ndarray
    base: np.ndarray
    graph_id: int | None = None

    @property
    def global_points(self) -> np.ndarray:
        return self.points + self.base


# projections


@dataclass(frozen=True, eq=False)
class Projection:
    """Project along ``direction``: fibers are the level sets of <p, direction>.

    ``transversality`` in (0, 1] estimates how far the fiber direction is from
    the tangent cone; it sets the search window.
    """

    direction: np.ndarray
    transversality: float = 1.0

    @property
    def fiber_direction(self) -> np.ndarray:
        u = self.direction
        return np.array([u[1], -u[0]])


def _form_ratio(form, e: np.ndarray) -> float:
    """|form(e)| relative to the max of |form| on the unit circle."""
    ang = np.linspace(0.0, math.pi, 721)
    top = max(abs(form.evaluate([math.cos(a), math.sin(a)])) for a in ang)
    if top == 0:
        return 0.0
    return abs(form.evaluate(list(e))) / top


def choose_projection(local: VarietySpec, seed: int = 0) -> Projection:
    """Pick a coordinate projection whose fibers avoid the algebraic tangent cone."""
    if local.kind == "parametric-graphs":
        return Projection(np.array([1.0, 0.0]))
    if local.kind not in ("implicit-real", "implicit-complex") or local.ambient_dim != 2:
        raise UnsupportedSpec(f"no fiber projection for {local.kind} with n={local.ambient_dim}")
    f = local.equation
    form = f.homogeneous_part(f.min_degree)
    best = None
    # fiber along e_y (project onto x) is tried first
    for u in (np.array([1.0, 0.0]), np.array([0.0, 1.0])):
        m = _form_ratio(form, np.array([u[1], -u[0]]))
        if best is None or m > best.transversality + 1e-12:
            best = Projection(u, m)
    if best.transversality >= 0.05 or local.is_complex:
        if best.transversality == 0:
            raise NonTransversalProjection("tangent cone contains both coordinate axes")
        return best
    rng = np.random.default_rng(seed)
    for _ in range(200):
        a = rng.uniform(0, math.pi)
        u = np.array([math.cos(a), math.sin(a)])
        m = _form_ratio(form, np.array([u[1], -u[0]]))
        if m >= 0.3:
            return Projection(u, m)
    raise NonTransversalProjection("no transversal projection found")


def _window(t: float, proj: Projection, cap: float) -> float:
    return min(cap, 4.0 * abs(t) / max(proj.transversality, 0.1))


# fibers


def _implicit_fiber(spec: VarietySpec, u: np.ndarray, value: float, window: float) -> Fiber:
    w = np.array([u[1], -u[0]])
    origin = value * u
    reach = window * window - value * value
    if reach <= 0:
        return Fiber(u, value, np.zeros((0, 2)), np.zeros(0))
    reach = math.sqrt(reach)
    coeffs = spec.equation.restrict_to_line(list(map(float, origin)), list(map(float, w)))
    if not coeffs:
        raise DegenerateFiber(f"fiber <p,u> = {value} lies inside the variety")
    found, multiple = _roots.real_roots(coeffs, -reach, reach)
    if multiple:
        warnings.warn(
            f"fiber at {value:.3g} is tangent to the variety; repeated roots counted once",
            DegenerateFiberWarning,
            stacklevel=3,
        )
    s = np.array(found, dtype=float)
    pts = origin[None, :] + s[:, None] * w[None, :]
    return Fiber(u, value, pts, s, degenerate=tuple(multiple))


def _graph_fiber(spec: VarietySpec, u: np.ndarray, value: float, window: float) -> Fiber:
    if abs(u[1]) > 1e-12:
        raise UnsupportedSpec("graph families are projected onto the x-axis only")
    x = value * u[0]
    rows = []
    for k, g in enumerate(spec.graphs):
        if not g.contains(x):
            continue
        y = g.value(x)
        if math.hypot(x, y) <= window:
            rows.append((y, k))
    rows.sort()
    pts = np.array([[x, y] for y, _ in rows]).reshape(-1, 2)
    return Fiber(u, value, pts, np.array([y for y, _ in rows]), tuple(k for _, k in rows))


def _horner(c: Sequence[complex], z: complex) -> tuple[complex, complex]:
    p = 0j
    dp = 0j
    for a in reversed(c):
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _complex_fiber(spec: VarietySpec, axis: int, value: complex, window: float) -> Fiber:
    """Solutions of f = 0 with coordinate ``axis`` fixed to the complex ``value``."""
    free = 1 - axis
    deg = spec.equation.degree
    c = [0j] * (deg + 1)
    for e, coef in spec.equation.items():
        c[e[free]] += float(coef) * value ** e[axis]
    while c and c[-1] == 0:
        c.pop()
    u = np.eye(2)[axis]
    if not c:
        raise DegenerateFiber("fiber lies inside the curve")
    if len(c) == 1:
        return Fiber(u, value, np.zeros((0, 4)), np.zeros(0, dtype=complex))
    zs = np.roots(c[::-1])
    polished = []
    for z in zs:
        z = complex(z)
        for _ in range(4):
            p, dp = _horner(c, z)
            if dp == 0:
                break
            step = p / dp
            z -= step
            if abs(step) <= 1e-17 * max(abs(z), 1e-300):
                break
        polished.append(z)
    polished.sort(key=lambda z: (z.real, z.imag))
    pts, coords = [], []
    for z in polished:
        coord = [0j, 0j]
        coord[axis] = value
        coord[free] = z
        if abs(coord[0]) ** 2 + abs(coord[1]) ** 2 <= window * window:
            pts.append(realify(coord))
            coords.append(z)
    return Fiber(u, value, np.array(pts).reshape(-1, 4), np.array(coords, dtype=complex))


def fiber_points(spec: VarietySpec, direction: Sequence[float], value, window: float) -> Fiber:
    """All points of ``spec`` on the fiber {<p, direction> = value} within ``window`` of 0."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    if spec.kind == "implicit-real" and spec.ambient_dim == 2:
        return _implicit_fiber(spec, u, float(value), window)
    if spec.kind == "parametric-graphs":
        return _graph_fiber(spec, u, float(value), window)
    if spec.kind == "implicit-complex":
        axis = int(np.argmax(np.abs(u)))
        if abs(abs(u[axis]) - 1) > 1e-12:
            raise UnsupportedSpec("complex curves are projected onto a coordinate axis")
        return _complex_fiber(spec, axis, complex(value), window)
    raise UnsupportedSpec(f"fibers are not defined for {spec.kind} specs")


# branches


def _sides(spec: VarietySpec) -> list[tuple[int, complex | float]]:
    if spec.is_complex:
        return [
            (k, complex(math.cos(COMPLEX_RAY_OFFSET + k * math.pi / 2), math.sin(COMPLEX_RAY_OFFSET + k * math.pi / 2)))
            for k in range(4)
        ]
    return [(1, 1.0), (-1, -1.0)]


def _side_label(spec: VarietySpec, side: int) -> str:
    if spec.is_complex:
        return f"ray{side}:"
    return "+" if side > 0 else "-"


def _stable_suffix(fibers: list[Fiber], key) -> int:
    """First rung index from which ``key(fiber)`` no longer changes."""
    last = key(fibers[-1])
    start = len(fibers) - 1
    while start > 0 and key(fibers[start - 1]) == last:
        start -= 1
    return start


def _normalized(coords: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(coords)) if coords.size else 0.0
    return coords / scale if scale > 0 else coords


def _chain(fibers: list[Fiber]) -> list[list[int]]:
    """Pair fiber points across rungs by nearest normalised fiber coordinate."""
    first = _normalized(fibers[0].coords)
    tracks = [[i] for i in range(len(first))]
    prev = first
    for r in range(1, len(fibers)):
        cur = _normalized(fibers[r].coords)
        used = set()
        for track in tracks:
            c = prev[track[-1]]
            d = np.abs(cur - c)
            order = np.argsort(d)
            best = int(order[0])
            if len(order) > 1:
                d1, d2 = d[order[0]], d[order[1]]
                if d2 <= PAIRING_MARGIN * d1 and d2 > 1e-9:
                    raise BranchPairingAmbiguous(
                        f"two continuations at scale index {r} are within 10% "
                        f"({d1:.3g} vs {d2:.3g}); densify the ladder"
                    )
            if best in used:
                raise BranchPairingAmbiguous(f"branches merge at scale index {r}")
            used.add(best)
            track.append(best)
        prev = cur
    return tracks


@dataclass(frozen=True, eq=False)
class LocalProblem:
    """A spec translated to the base point together with its fiber projection."""

    spec: VarietySpec  # original
    local: VarietySpec
    base: np.ndarray
    projection: Projection | None
    window: float = DEFAULT_WINDOW

    @classmethod
    def build(cls, spec, base, direction=None, window=DEFAULT_WINDOW, seed=0) -> "LocalProblem":
        base = spec.check_point(base)
        local = spec.localize(base)
        if spec.kind == "region":
            return cls(spec, local, base, None, window)
        if direction is None:
            proj = choose_projection(local, seed)
        else:
            u = np.asarray(direction, dtype=float)
            u = u / np.linalg.norm(u)
            proj = Projection(u, 1.0)
        return cls(spec, local, base, proj, window)

    def fiber(self, value, scale: float) -> Fiber:
        return fiber_points(self.local, self.projection.direction, value, _window(scale, self.projection, self.window))


def sample_branches(
    spec: VarietySpec,
    base: Sequence[float],
    ladder: ScaleLadder | None = None,
    *,
    direction: Sequence[float] | None = None,
    window: float = DEFAULT_WINDOW,
    seed: int = 0,
) -> list[Branch]:
    """Branches of ``spec`` through ``base``; one per continued fiber point on each side."""
    ladder = ladder or ScaleLadder.default()
    if spec.kind == "region":
        raise UnsupportedSpec("regions are sampled by area, not by branches")
    problem = LocalProblem.build(spec, base, direction, window, seed)
    return _branches(problem, ladder)


def _branches(problem: LocalProblem, ladder: ScaleLadder) -> list[Branch]:
    spec = problem.local
    out: list[Branch] = []
    for side, unit in _sides(spec):
        fibers = [problem.fiber(unit * t, t) for t in ladder]
        if spec.kind == "parametric-graphs":
            start = _stable_suffix(fibers, lambda f: tuple(sorted(f.graph_ids)))
        else:
            start = _stable_suffix(fibers, len)
        fibers = fibers[start:]
        scales = ladder.scales[start:]
        if not len(fibers[-1]):
            continue
        if spec.kind == "parametric-graphs":
            tracks = [[f.graph_ids.index(g) for f in fibers] for g in fibers[-1].graph_ids]
            ids = list(fibers[-1].graph_ids)
        else:
            tracks = _chain(fibers)
            ids = [None] * len(tracks)
        for k, track in enumerate(tracks):
            pts = np.array([f.points[i] for f, i in zip(fibers, track)])
            out.append(
                Branch(
                    side,
                    f"{_side_label(spec, side)}{k}",
                    scales,
                    pts,
                    problem.base,
                    ids[k],
                )
            )
    return out


def branch_count(branches: Sequence[Branch]) -> int:
    """Largest number of branches over one side of the projection (the max fiber size)."""
    per_side: dict[int, int] = {}
    for b in branches:
        per_side[b.side] = per_side.get(b.side, 0) + 1
    return max(per_side.values(), default=0)


# multiplicity mod 2


@dataclass(frozen=True)
class ParityReport:
    parity: int
    counts: tuple[int, ...]
    values: tuple[float, ...]
    dissent: int
    direction: tuple[float, ...]
    min_cone_delta: float


def fiber_parities(
    spec: VarietySpec,
    base: Sequence[float],
    direction: Sequence[float] | None = None,
    *,
    c4=None,
    seed: int = 0,
) -> ParityReport:
    """Fiber cardinalities of a transversal projection at 8 generic small offsets."""
    from .grassmannian import delta, line
    from .nash import compute_C4

    if spec.kind != "implicit-real" or spec.ambient_dim != 2:
        raise UnsupportedSpec("multiplicity parity needs a real plane curve")
    problem = LocalProblem.build(spec, base, direction, seed=seed)
    if c4 is None:
        c4 = compute_C4(spec, base)
    fiber_line = line(problem.projection.fiber_direction)
    gaps = [delta(fiber_line, L) for L in c4] or [math.sqrt(2)]
    gap = min(gaps)
    if gap <= 0.1:
        raise NonTransversalProjection(
            f"fiber direction is within delta {gap:.3g} of a limit tangent (need > 0.1)"
        )
    phi = 2 * math.asin(min(gap / 2, 1.0))
    sin_phi = math.sin(phi)
    # curved branches leave the affine picture when sin(phi)^2 is small; shrink the offsets
    shrink = min(1.0, 25 * sin_phi**2)
    rng = np.random.default_rng(seed)
    counts, values = [], []
    u = problem.projection.direction
    for j in range(4):
        for sign in (1, -1):
            for _attempt in range(5):
                t = sign * 1e-2 * 2.0**-j * shrink * (1 + 0.1 * rng.uniform(-1, 1))
                win = min(problem.window, 2 * abs(t) / sin_phi)
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", DegenerateFiberWarning)
                    fib = fiber_points(problem.local, u, t, win)
                if not fib.degenerate:
                    break
            counts.append(len(fib))
            values.append(t)
    parities = [c % 2 for c in counts]
    ones = sum(parities)
    parity = 1 if ones > len(parities) / 2 else 0
    dissent = ones if parity == 0 else len(parities) - ones
    if dissent > 1:
        raise InconsistentParity(f"fiber counts {counts} disagree on {dissent} of {len(counts)} fibers")
    return ParityReport(parity, tuple(counts), tuple(values), dissent, tuple(map(float, u)), gap)


def multiplicity_mod2(
    spec: VarietySpec, base: Sequence[float], direction: Sequence[float] | None = None, *, seed: int = 0
) -> int:
    return fiber_parities(spec, base, direction, seed=seed).parity


# random points


def random_regular_points(spec: VarietySpec, count: int, seed: int = 0, box: float = 2.0) -> list[np.ndarray]:
    """Random points of ``spec`` away from its singular locus (plane curves, graphs, regions)."""
    rng = np.random.default_rng(seed)
    out: list[np.ndarray] = []
    tries = 0
    while len(out) < count and tries < 200 * count:
        tries += 1
        if spec.kind == "parametric-graphs":
            g = spec.graphs[rng.integers(len(spec.graphs))]
            a, b = g.domain
            x = rng.uniform(a + 0.05 * (b - a), b - 0.05 * (b - a))
            try:
                out.append(np.array([x, g.value(x)]))
            except UnsupportedSpec:
                continue
        elif spec.kind == "region":
            p = rng.uniform(-box, box, spec.ambient_dim)
            if spec.equation.evaluate(list(p)) < 0:
                out.append(p)
        elif spec.kind == "implicit-real" and spec.ambient_dim == 2:
            a = rng.uniform(0, math.pi)
            u = np.array([math.cos(a), math.sin(a)])
            fib = fiber_points(spec, u, rng.uniform(-box, box), 2 * box)
            for p in fib.points:
                grad = np.array([g.evaluate(list(p)) for g in spec.equation.gradient()])
                if np.linalg.norm(grad) > 1e-3:
                    out.append(p)
                    break
        else:
            raise UnsupportedSpec(f"random points are not implemented for {spec.kind}")
    return out[:count]
