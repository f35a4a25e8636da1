"""Modulus-of-continuity estimates for the inverse Nash mapping and smoothness verdicts.

Distances are carried as natural logarithms throughout: for the exponentially
flat graph families the branch gap at the finest rungs is far below the
smallest double, while its logarithm is an ordinary number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DerivativeBoundViolated,
    DerivativeVanishes,
    DomainViolation,
    InsufficientScales,
    NashLabError,
    NotInjective,
    ScaleTooLarge,
    SingleBranch,
    UnsupportedSpec,
)
from .expr import Expr, parse_expression
from .grassmannian import delta, delta_batch, line
from .nash import TangentConeReport, _local_tangent, coincide_linearly, nash_lift
from .sampler import (
    Branch,
    LocalProblem,
    ParityReport,
    ScaleLadder,
    _branches,
    branch_count,
    fiber_parities,
)
from .variety import VarietySpec

CROSS = "cross-branch"
WITHIN = "within-branch"
FIT_RUNGS = 6
BILIP_SLOPE_TOL = 0.05
BILIP_GROWTH_TOL = 2.0
SMALL_SLOPE = 1e-6  # below this, tangent gaps are computed from slope differences in log space


@dataclass(frozen=True, eq=False)
class PairSample:
    p: np.ndarray
    q: np.ndarray
    log_dist: float
    log_nash_dist: float
    scale: float
    strategy: str

    @property
    def dist(self) -> float:
        return math.exp(self.log_dist)

    @property
    def nash_dist(self) -> float:
        return math.exp(self.log_nash_dist)

    @property
    def log_ratio(self) -> float:
        return self.log_nash_dist - self.log_dist


def _log(x: float) -> float:
    return math.log(x) if x > 0 else -math.inf


def _generic_pair(local, a: Branch, i: int, b: Branch, j: int, strategy: str) -> PairSample | None:
    p, q = a.points[i], b.points[j]
    dist = float(np.linalg.norm(p - q))
    if dist == 0:
        return None
    gap = delta(_local_tangent(local, a, i), _local_tangent(local, b, j))
    return PairSample(p + a.base, q + b.base, _log(dist), _log(max(dist, gap)), a.scales[i], strategy)


def _log_slope_gap(local: VarietySpec, a: Branch, i: int, b: Branch, j: int) -> float:
    ga, gb = local.graphs[a.graph_id], local.graphs[b.graph_id]
    xa, xb = a.points[i][0], b.points[j][0]
    sa, sb = ga.log_slope(xa), gb.log_slope(xb)
    fa, fb = sa.to_float(), sb.to_float()
    if max(abs(fa), abs(fb)) > SMALL_SLOPE:
        return _log(delta(line([1.0, fa]), line([1.0, fb])))
    # tan of the angle between the lines is |a - b| / (1 + ab) with |ab| < 1e-12
    return (sa - sb).log


def _graph_pair(local: VarietySpec, a: Branch, i: int, b: Branch, j: int, strategy: str) -> PairSample | None:
    ga, gb = local.graphs[a.graph_id], local.graphs[b.graph_id]
    xa, xb = a.points[i][0], b.points[j][0]
    dh = ga.log_value(xa) - gb.log_value(xb)
    dx = xa - xb
    if dx == 0:
        log_dist = dh.log
    else:
        log_dist = 0.5 * _log(dx * dx + dh.to_float() ** 2) if dh.log > -600 else _log(abs(dx))
    if log_dist == -math.inf:
        return None
    log_gap = _log_slope_gap(local, a, i, b, j)
    p = a.points[i] + a.base
    q = b.points[j] + b.base
    return PairSample(p, q, log_dist, max(log_dist, log_gap), a.scales[i], strategy)


def _pair(local, a, i, b, j, strategy):
    if local.kind == "parametric-graphs":
        return _graph_pair(local, a, i, b, j, strategy)
    return _generic_pair(local, a, i, b, j, strategy)


def _region_samples(problem: LocalProblem, ladder: ScaleLadder) -> list[PairSample]:
    """Consecutive points along an interior ray; the tangent lift is constant there."""
    f = problem.local.equation
    n = problem.local.ambient_dim
    finest = ladder.scales[-1]
    ray = None
    for k in range(720):
        a = 2 * math.pi * k / 720
        v = np.zeros(n)
        v[0], v[1] = math.cos(a), math.sin(a)
        if all(f.evaluate(list(t * v)) <= 0 for t in (finest, *ladder.scales)):
            ray = v
            break
    if ray is None:
        raise SingleBranch("no interior ray reaches the base point")
    out = []
    for t0, t1 in zip(ladder.scales, ladder.scales[1:]):
        dist = t0 - t1
        out.append(PairSample(problem.base + t0 * ray, problem.base + t1 * ray, math.log(dist), math.log(dist), t0, WITHIN))
    return out


def sample_pairs(
    spec: VarietySpec,
    base: Sequence[float],
    ladder: ScaleLadder | None = None,
    strategy: str = CROSS,
    *,
    seed: int = 0,
    branches: list[Branch] | None = None,
) -> list[PairSample]:
    """Point pairs near ``base`` with their distance and Nash distance."""
    ladder = ladder or ScaleLadder.default()
    if strategy not in (CROSS, WITHIN):
        raise ValueError(f"unknown strategy {strategy!r}")
    problem = LocalProblem.build(spec, base, seed=seed)
    if spec.kind == "region":
        if strategy == CROSS:
            raise SingleBranch("a region has no separate branches")
        return _region_samples(problem, ladder)
    if branches is None:
        branches = _branches(problem, ladder)
    local = problem.local
    out: list[PairSample] = []
    if strategy == WITHIN:
        for b in branches:
            for i in range(len(b.points) - 1):
                s = _pair(local, b, i, b, i + 1, WITHIN)
                if s is not None:
                    out.append(s)
        return out
    by_side: dict[int, list[Branch]] = {}
    for b in branches:
        by_side.setdefault(b.side, []).append(b)
    if all(len(v) < 2 for v in by_side.values()):
        raise SingleBranch("no side of the projection carries two branches")
    for side_branches in by_side.values():
        for x in range(len(side_branches)):
            for y in range(x + 1, len(side_branches)):
                a, b = side_branches[x], side_branches[y]
                for i in range(len(a.points)):
                    s = _pair(local, a, i, b, i, CROSS)
                    if s is not None:
                        out.append(s)
    return out


# fits


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r_squared: float
    count: int


def _linfit(x: Sequence[float], y: Sequence[float]) -> LineFit:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0:
        raise InsufficientScales("regression needs at least two distinct abscissae")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    if ss_tot <= 1e-30 * max(1.0, float(np.sum(y * y))):
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return LineFit(float(slope), float(intercept), r2, int(x.size))


def _finest(samples: Sequence[PairSample], rungs: int = FIT_RUNGS) -> list[PairSample]:
    scales = sorted({s.scale for s in samples})[:rungs]
    keep = set(scales)
    return [s for s in samples if s.scale in keep]


def _check_span(samples: Sequence[PairSample]):
    if len(samples) < FIT_RUNGS:
        raise InsufficientScales(f"need at least {FIT_RUNGS} samples, got {len(samples)}")
    logs = [s.log_dist for s in samples]
    decades = (max(logs) - min(logs)) / math.log(10)
    if decades < 2:
        raise InsufficientScales(f"samples span {decades:.2f} decades of distance, need 2")


def fit_holder(samples: Sequence[PairSample]) -> LineFit:
    """Slope of log nash_dist against log dist over the finest rungs."""
    _check_span(samples)
    fine = _finest(samples)
    return _linfit([s.log_dist for s in fine], [s.log_nash_dist for s in fine])


def fit_loglip(samples: Sequence[PairSample]) -> LineFit:
    """Slope of log(nash_dist / dist) against log|log dist| over the finest rungs."""
    _check_span(samples)
    if any(s.log_dist >= math.log(0.5) for s in samples):
        raise ScaleTooLarge("log-Lipschitz fits need every distance below 1/2")
    fine = _finest(samples)
    return _linfit([math.log(-s.log_dist) for s in fine], [s.log_ratio for s in fine])


@dataclass(frozen=True)
class BilipResult:
    is_bilip: bool
    max_ratio: float
    ratio_slope: float
    ratio_growth: float


def bilip_test(samples: Sequence[PairSample]) -> BilipResult:
    """Is nash_dist / dist bounded near the base point?

    The slope is taken against log dist; a bounded ratio also has to stay
    within a factor 2 over the finest rungs.
    """
    _check_span(samples)
    fine = _finest(samples)
    fit = _linfit([s.log_dist for s in fine], [s.log_ratio for s in fine])
    ratios = [s.log_ratio for s in fine]
    growth = math.exp(min(max(ratios) - min(ratios), 700.0))
    top = max(s.log_ratio for s in samples)
    max_ratio = math.exp(top) if top < 700 else math.inf
    ok = abs(fit.slope) <= BILIP_SLOPE_TOL and growth <= BILIP_GROWTH_TOL
    return BilipResult(ok, max_ratio, fit.slope, growth)


@dataclass(frozen=True)
class Dichotomy:
    gamma_bounded: float
    gamma_divergent: float
    bounded_growth: float  # max over rungs of Q_j / Q_0 at gamma_bounded
    divergent_growth: float  # Q_last / Q_0 at gamma_divergent
    passes: bool


def _rung_q(samples: Sequence[PairSample], gamma: float) -> list[float]:
    by_scale: dict[float, float] = {}
    for s in samples:
        q = s.log_ratio - gamma * math.log(-s.log_dist)
        by_scale[s.scale] = max(q, by_scale.get(s.scale, -math.inf))
    return [by_scale[k] for k in sorted(by_scale, reverse=True)]


def loglip_dichotomy(samples: Sequence[PairSample], gamma_bounded: float, gamma_divergent: float) -> Dichotomy:
    """Boundedness of nash_dist / (dist |log dist|^gamma) along the ladder, on both sides of gamma*."""
    if any(s.log_dist >= math.log(0.5) for s in samples):
        raise ScaleTooLarge("log-Lipschitz checks need every distance below 1/2")
    qb = _rung_q(samples, gamma_bounded)
    qd = _rung_q(samples, gamma_divergent)
    if len(qb) < 3:
        raise InsufficientScales("dichotomy needs at least three rungs")
    bounded = math.exp(min(max(q - qb[0] for q in qb), 700.0))
    divergent = math.exp(min(qd[-1] - qd[0], 700.0))
    return Dichotomy(gamma_bounded, gamma_divergent, bounded, divergent, bounded <= 2.0 and divergent > 10.0)


@dataclass(frozen=True)
class ModulusFit:
    strategy: str
    sample_count: int
    alpha_hat: float | None  # clamped to (0, 1.05]
    alpha_raw: float | None
    gamma_hat: float | None
    max_ratio: float | None
    ratio_slope: float | None
    r_squared_alpha: float | None
    r_squared_gamma: float | None
    is_bilip: bool | None
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "sample_count": self.sample_count,
            "alpha_hat": self.alpha_hat,
            "alpha_raw": self.alpha_raw,
            "alpha_label": "fitted",
            "gamma_hat": self.gamma_hat,
            "max_ratio": self.max_ratio,
            "ratio_slope": self.ratio_slope,
            "r_squared": {"alpha": self.r_squared_alpha, "gamma": self.r_squared_gamma},
            "is_bilip": self.is_bilip,
            "notes": list(self.notes),
        }


def fit_modulus(samples: Sequence[PairSample], strategy: str) -> ModulusFit:
    notes = []
    alpha = alpha_raw = r2a = gamma = r2g = None
    max_ratio = slope = is_bilip = None
    try:
        h = fit_holder(samples)
        alpha_raw, r2a = h.slope, h.r_squared
        alpha = min(max(h.slope, 1e-9), 1.05)
    except NashLabError as exc:
        notes.append(f"holder fit: {exc}")
    try:
        g = fit_loglip(samples)
        gamma, r2g = g.slope, g.r_squared
    except NashLabError as exc:
        notes.append(f"log-Lipschitz fit: {exc}")
    try:
        b = bilip_test(samples)
        max_ratio, slope, is_bilip = b.max_ratio, b.ratio_slope, b.is_bilip
    except NashLabError as exc:
        notes.append(f"bi-Lipschitz test: {exc}")
    return ModulusFit(strategy, len(samples), alpha, alpha_raw, gamma, max_ratio, slope, r2a, r2g, is_bilip, tuple(notes))


# the inequality between tangent gaps and derivative gaps


def k_tilde(lam: float) -> float:
    return math.sqrt(2) / (2 * lam * math.sqrt(1 + lam * lam))


def _graph_frames(jac: np.ndarray) -> np.ndarray:
    """Orthonormal frames (N, m, m+k) of the tangent planes span of columns of [I; Df]."""
    nb, k, m = jac.shape
    stacked = np.concatenate([np.broadcast_to(np.eye(m), (nb, m, m)), jac], axis=1)
    q, _ = np.linalg.qr(stacked)
    return np.swapaxes(q, 1, 2)


def tangent_inequality_margins(jac_i: np.ndarray, jac_j: np.ndarray, lam: float) -> np.ndarray:
    """delta(T_i, T_j) - K(lam) * ||Df_i - Df_j|| for stacks of Jacobians of shape (N, k, m)."""
    if lam < 1:
        raise ValueError("lambda must be at least 1")
    jac_i = np.asarray(jac_i, dtype=float)
    jac_j = np.asarray(jac_j, dtype=float)
    norms_i = np.linalg.norm(jac_i, ord=2, axis=(1, 2))
    norms_j = np.linalg.norm(jac_j, ord=2, axis=(1, 2))
    worst = float(max(norms_i.max(), norms_j.max()))
    if worst > lam * (1 + 1e-12):
        raise DerivativeBoundViolated(f"derivative norm {worst:.6g} exceeds lambda = {lam}")
    gap = delta_batch(_graph_frames(jac_i), _graph_frames(jac_j))
    diff = np.linalg.norm(jac_i - jac_j, ord=2, axis=(1, 2))
    return gap - k_tilde(lam) * diff


def check_tangent_derivative_inequality(
    jac_i: Callable[[np.ndarray], np.ndarray],
    jac_j: Callable[[np.ndarray], np.ndarray],
    lam: float,
    points: np.ndarray,
) -> float:
    """Minimum margin of the inequality over ``points`` (shape (N, m)); Jacobian callables are vectorised."""
    points = np.asarray(points, dtype=float)
    return float(tangent_inequality_margins(jac_i(points), jac_j(points), lam).min())


# the two calculus lemmas

LEMMA_GRID = tuple(0.1 * 2.0**-j for j in range(21))


@dataclass(frozen=True)
class LemmaCheck:
    function: str
    grid: tuple[float, ...]
    values: tuple[float, ...]
    tail: float
    monotone: bool
    passes: bool


def _as_expr(g) -> Expr:
    return parse_expression(g, "t") if isinstance(g, str) else g


def verify_lemma_ratio(g, grid: Sequence[float] = LEMMA_GRID, threshold: float = 1e-3) -> LemmaCheck:
    """g / g' on a dyadic grid toward 0 (expected to decay to 0)."""
    g = _as_expr(g)
    dg = g.diff()
    vals = []
    for t in grid:
        lg, ldg = g.evaluate_log(t), dg.evaluate_log(t)
        if ldg.sign == 0:
            raise DerivativeVanishes(f"g' vanishes at t = {t}")
        vals.append((lg / ldg).to_float())
    mags = [abs(v) for v in vals]
    monotone = all(b < a for a, b in zip(mags, mags[1:]))
    tail = vals[-1]
    return LemmaCheck(g.text(), tuple(grid), tuple(vals), tail, monotone, abs(tail) < threshold and monotone)


def verify_lemma_loglip(g, grid: Sequence[float] = LEMMA_GRID, threshold: float = 1e3) -> LemmaCheck:
    """g' / (g log g) on a dyadic grid toward 0 (expected to diverge to -infinity)."""
    g = _as_expr(g)
    dg = g.diff()
    vals = []
    for t in grid:
        lg = g.evaluate_log(t)
        if lg.sign <= 0 or lg.log >= 0:
            raise DomainViolation(f"g(t) must lie in (0, 1); fails at t = {t}")
        ldg = dg.evaluate_log(t)
        quotient = (ldg / lg).to_float() if ldg.sign else 0.0
        vals.append(quotient / lg.log)
    mags = [abs(v) for v in vals]
    monotone = all(b > a for a, b in zip(mags, mags[1:]))
    tail = vals[-1]
    return LemmaCheck(g.text(), tuple(grid), tuple(vals), tail, monotone, abs(tail) > threshold and monotone)


# verdicts

CLASSIFICATIONS = (
    "smooth-bi-lipschitz",
    "C11-submanifold",
    "not-C1",
    "criterion-inapplicable",
    "eta-not-injective",
)
POSITIVE = ("smooth-bi-lipschitz", "C11-submanifold")


@dataclass
class Verdict:
    classification: str
    evidence: list = field(default_factory=list)  # (tag, measured, threshold)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "classification": self.classification,
            "evidence": [{"tag": t, "measured": m, "threshold": th} for t, m, th in self.evidence],
            "notes": list(self.notes),
        }


@dataclass
class PointAnalysis:
    spec: VarietySpec
    base: np.ndarray
    ladder: ScaleLadder
    seed: int
    cones: TangentConeReport | None = None
    parity: ParityReport | None = None
    branch_count: int | None = None
    samples: dict = field(default_factory=dict)  # strategy -> list[PairSample]
    fits: dict = field(default_factory=dict)  # strategy -> ModulusFit
    verdict: Verdict | None = None
    notes: list = field(default_factory=list)


def _strategy(spec: VarietySpec, branches: list[Branch]) -> str:
    if spec.kind == "region":
        return WITHIN
    sides: dict[int, int] = {}
    for b in branches:
        sides[b.side] = sides.get(b.side, 0) + 1
    return CROSS if any(v >= 2 for v in sides.values()) else WITHIN


def analyze(
    spec: VarietySpec,
    base: Sequence[float],
    ladder: ScaleLadder | None = None,
    *,
    seed: int = 0,
) -> PointAnalysis:
    """Full per-point pipeline: cones, parity, pair samples, fits, and the verdict."""
    ladder = ladder or ScaleLadder.default()
    out = PointAnalysis(spec, np.asarray(base, dtype=float), ladder, seed)
    try:
        out.verdict = _decide(spec, out, ladder, seed)
    except NashLabError as exc:
        out.verdict = Verdict(
            "criterion-inapplicable",
            [("error", type(exc).__name__, None)],
            [f"{type(exc).__name__}: {exc}"],
        )
    return out


def _decide(spec, out: PointAnalysis, ladder, seed) -> Verdict:
    base = spec.check_point(out.base)
    try:
        nash_lift(spec, base, ladder, seed=seed)
    except NotInjective as exc:
        return Verdict(
            "eta-not-injective",
            [("eta-bijective", len(exc.spaces), 1)],
            [f"tangent limits split into {len(exc.spaces)} subspaces; the set is not C1 at this point"],
        )
    cones = coincide_linearly(spec, base, ladder, seed=seed)
    out.cones = cones
    if spec.kind == "implicit-real" and spec.ambient_dim == 2:
        try:
            out.parity = fiber_parities(spec, base, c4=cones.c4_spaces, seed=seed)
        except NashLabError as exc:
            out.notes.append(f"multiplicity parity: {type(exc).__name__}: {exc}")
    branches: list[Branch] = []
    if spec.kind != "region":
        problem = LocalProblem.build(spec, base, seed=seed)
        branches = _branches(problem, ladder)
        out.branch_count = branch_count(branches)
    strategy = _strategy(spec, branches)
    samples = sample_pairs(spec, base, ladder, strategy, seed=seed, branches=branches or None)
    out.samples[strategy] = samples
    fit = fit_modulus(samples, strategy)
    out.fits[strategy] = fit

    evidence = [("cones-coincide-linearly", cones.c3_c4_delta, 0.05)]
    notes = []
    if fit.ratio_slope is not None:
        evidence.append(("eta-inverse-lipschitz:ratio-slope", fit.ratio_slope, BILIP_SLOPE_TOL))
    if fit.alpha_raw is not None:
        evidence.append(("holder-exponent", fit.alpha_raw, 1.0))
    bilip = fit.is_bilip

    if not cones.coincide_linearly:
        if spec.kind == "region":
            notes.append(
                "C3 and C4 do not coincide linearly here, so the set is not a C1 submanifold at this point; "
                "eta may still be a smooth diffeomorphism (the tangent lift is constant)"
            )
            return Verdict("criterion-inapplicable", evidence, notes)
        if bilip is False:
            notes.append("C3 is not a linear space equal to C4 and the inverse Nash mapping is not Lipschitz")
            return Verdict("not-C1", evidence, notes)
        notes.append("C3 and C4 do not coincide linearly")
        return Verdict("criterion-inapplicable", evidence, notes)
    if bilip:
        if spec.is_complex:
            notes.append("eta is a locally bi-Lipschitz homeomorphism: the curve is smooth here")
            return Verdict("smooth-bi-lipschitz", evidence, notes)
        notes.append("cones coincide linearly and eta is locally bi-Lipschitz: C^{1,1} submanifold here")
        return Verdict("C11-submanifold", evidence, notes)
    if fit.alpha_raw is not None and fit.alpha_raw < 1:
        notes.append(f"inverse Nash mapping only Hölder with fitted exponent {fit.alpha_raw:.3f}; singular here")
        return Verdict("not-C1", evidence, notes)
    notes.append("bi-Lipschitz test failed but the fitted Hölder exponent is not below 1")
    return Verdict("criterion-inapplicable", evidence, notes + list(fit.notes))


def classify(spec: VarietySpec, base: Sequence[float], ladder: ScaleLadder | None = None, *, seed: int = 0) -> Verdict:
    return analyze(spec, base, ladder, seed=seed).verdict


def classify_set(
    spec: VarietySpec,
    probes: Sequence[Sequence[float]] | None = None,
    ladder: ScaleLadder | None = None,
    *,
    seed: int = 0,
) -> tuple[Verdict, list[tuple[np.ndarray, Verdict]]]:
    """Conjunction of per-point verdicts (default probes: origin if on the set, plus 8 random points)."""
    from .sampler import random_regular_points

    if probes is None:
        probes = []
        origin = np.zeros(spec.real_dim)
        try:
            spec.check_point(origin)
            probes.append(origin)
        except NashLabError:
            pass
        probes += random_regular_points(spec, 8, seed=seed)
    results = [(np.asarray(p, float), classify(spec, p, ladder, seed=seed)) for p in probes]
    if not results:
        raise UnsupportedSpec("no probe points")
    for _, v in results:
        if v.classification not in POSITIVE:
            return Verdict(v.classification, list(v.evidence), ["first failing probe decides"] + v.notes), results
    cls = "smooth-bi-lipschitz" if all(v.classification == "smooth-bi-lipschitz" for _, v in results) else "C11-submanifold"
    return Verdict(cls, [("probes-positive", len(results), len(results))], []), results
