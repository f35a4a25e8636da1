"""Built-in example sets and the pass/fail example suite."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NashLabError, NotInjective
from .grassmannian import delta, hausdorff_delta_oracle, random_subspace
from .nash import coincide_linearly, nash_lift
from .regularity import (
    analyze,
    fit_loglip,
    loglip_dichotomy,
    sample_pairs,
    tangent_inequality_margins,
    verify_lemma_loglip,
    verify_lemma_ratio,
)
from .sampler import ScaleLadder, branch_count, multiplicity_mod2, sample_branches
from .variety import VarietySpec


def implicit(equation: str, kind: str = "implicit-real") -> dict:
    return {"kind": kind, "variables": ["x", "y"], "equation": equation, "ambient_dim": 2}


def graphs(*pieces: tuple[str, tuple[float, float]]) -> dict:
    return {
        "kind": "parametric-graphs",
        "variables": ["x", "y"],
        "graphs": [{"expr": e, "domain": list(d)} for e, d in pieces],
        "ambient_dim": 2,
    }


def exp_pair(m: int, both_sides: bool) -> dict:
    flat = f"x^3*exp(-1/x^{m})" if m > 1 else "x^3*exp(-1/x)"
    pieces = [(flat, (0.0, 1.0)), ("-" + flat, (0.0, 1.0))]
    if both_sides:
        pieces += [(flat, (-1.0, 0.0)), ("-" + flat, (-1.0, 0.0))]
    return graphs(*pieces)


SPECS: dict[str, dict] = {
    "cusp": implicit("x^2 = y^3"),
    "cusp_complex": implicit("x^2 = y^3", "implicit-complex"),
    "complex_line": implicit("x + y = 0", "implicit-complex"),
    "X1": implicit("y^2 = x^3"),
    "X2": implicit("y^2 = x^5"),
    "X3": implicit("y^2 = x^7"),
    "Y1": implicit("x^4 = y^6"),
    "Y2": implicit("x^4 = y^10"),
    "circle": implicit("x^2 + y^2 = 1"),
    "node": implicit("y^2 = x^2*(x+1)"),
    "f_pm": graphs(
        ("x^3*exp(-1/x)", (0.0, 1.0)),
        ("-x^3*exp(-1/x)", (0.0, 1.0)),
        ("0", (-1.0, 0.0)),
    ),
    "h_pm2": exp_pair(2, both_sides=True),
    "g_pm2": exp_pair(2, both_sides=False),
    "Z": {"kind": "region", "variables": ["x", "y"], "equation": "y^2 - x^3", "ambient_dim": 2},
    "x_abs_x": graphs(("x^2", (0.0, 1.0)), ("-x^2", (-1.0, 0.0))),
}

ORIGIN2 = (0.0, 0.0)
ORIGIN4 = (0.0, 0.0, 0.0, 0.0)


def spec(name: str) -> VarietySpec:
    return VarietySpec.from_document(SPECS[name])


LEMMA_FUNCTIONS = ("t^2", "t^(5/2)", "t^3*exp(-1/t)", "t^3*exp(-1/t^2)")

# ladder for the gamma fit of the exponential family (coarse scales, see the fit notes)
GAMMA_LADDER = ScaleLadder.between(0.1, 0.02, 0.75)


@dataclass
class Row:
    id: str
    expected: str
    measured: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "expected": self.expected,
            "measured": self.measured,
            "pass": self.passed,
            "details": self.details,
        }


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.4g}"
    return str(x)


def _xk(k: int) -> Callable[[int], Row]:
    def run(seed: int) -> Row:
        target = (2 * k - 1) / (2 * k + 1)
        a = analyze(spec(f"X{k}"), ORIGIN2, seed=seed)
        fit = next(iter(a.fits.values()))
        alpha = fit.alpha_raw
        ok = alpha is not None and abs(alpha - target) <= 0.03 and a.verdict.classification == "not-C1"
        return Row(
            f"Xk_k={k}",
            f"alpha = {target:.4g} +- 0.03, not-C1",
            f"alpha = {_fmt(alpha)}, {a.verdict.classification}",
            ok,
            {"alpha_hat": alpha, "verdict": a.verdict.classification},
        )

    return run


def _yk(k: int) -> Callable[[int], Row]:
    def run(seed: int) -> Row:
        s = spec(f"Y{k}")
        cones = coincide_linearly(s, ORIGIN2, seed=seed)
        count = branch_count(sample_branches(s, ORIGIN2, seed=seed))
        gap = cones.c3_c4_delta
        ok = cones.c3_is_linear and gap is not None and gap < 0.05 and cones.coincide_linearly and count == 2
        return Row(
            f"Yk_k={k}",
            "C3 linear, delta(span C3, C4) < 0.05, 2 branches",
            f"C3 linear {_fmt(cones.c3_is_linear)}, delta {_fmt(gap)}, {count} branches",
            ok,
            {"c3_is_linear": cones.c3_is_linear, "delta": gap, "branch_count": count},
        )

    return run


def _cusp(seed: int) -> Row:
    a = analyze(spec("cusp"), ORIGIN2, seed=seed)
    fit = next(iter(a.fits.values()))
    ok = (
        a.verdict.classification == "not-C1"
        and fit.alpha_raw is not None
        and abs(fit.alpha_raw - 1 / 3) <= 0.03
        and not a.cones.c3_is_linear
        and not a.cones.coincide_linearly
    )
    return Row(
        "cusp",
        "not-C1, alpha = 1/3, C3 a half-line",
        f"{a.verdict.classification}, alpha = {_fmt(fit.alpha_raw)}, C3 rays {len(a.cones.c3_rays)}",
        ok,
        {"alpha_hat": fit.alpha_raw, "c3_is_linear": a.cones.c3_is_linear},
    )


def _cusp_complex(seed: int) -> Row:
    s = spec("cusp_complex")
    nash_lift(s, ORIGIN4, seed=seed)  # raises unless the limit tangent is unique
    a = analyze(s, ORIGIN4, seed=seed)
    fit = next(iter(a.fits.values()))
    slope = fit.ratio_slope
    ok = (
        fit.is_bilip is False
        and slope is not None
        and abs(slope + 2 / 3) <= 0.05
        and a.verdict.classification == "not-C1"
    )
    return Row(
        "cusp_complex",
        "eta bijective over 0, bilip false, ratio slope -2/3 +- 0.05, singular",
        f"bilip {_fmt(fit.is_bilip)}, ratio slope {_fmt(slope)}, {a.verdict.classification}",
        ok,
        {"ratio_slope": slope, "verdict": a.verdict.classification},
    )


def _complex_line(seed: int) -> Row:
    a = analyze(spec("complex_line"), ORIGIN4, seed=seed)
    fit = next(iter(a.fits.values()))
    ok = fit.is_bilip is True and a.verdict.classification == "smooth-bi-lipschitz"
    return Row(
        "complex_line",
        "bilip true, smooth-bi-lipschitz",
        f"bilip {_fmt(fit.is_bilip)}, {a.verdict.classification}",
        ok,
        {"verdict": a.verdict.classification},
    )


def _circle(seed: int) -> Row:
    a = analyze(spec("circle"), (1.0, 0.0), seed=seed)
    fit = next(iter(a.fits.values()))
    ok = fit.is_bilip is True and a.verdict.classification == "C11-submanifold"
    return Row(
        "circle",
        "bilip true, C11-submanifold",
        f"bilip {_fmt(fit.is_bilip)}, alpha {_fmt(fit.alpha_raw)}, {a.verdict.classification}",
        ok,
        {"alpha_hat": fit.alpha_raw, "verdict": a.verdict.classification},
    )


def _node(seed: int) -> Row:
    try:
        nash_lift(spec("node"), ORIGIN2, seed=seed)
    except NotInjective as exc:
        sep = min(
            (delta(a, b) for i, a in enumerate(exc.spaces) for b in exc.spaces[i + 1 :]),
            default=0.0,
        )
        slopes = sorted(float(s.frame[0, 1] / s.frame[0, 0]) for s in exc.spaces)
        ok = len(exc.spaces) == 2 and sep > 0.4 and all(abs(abs(v) - 1) < 1e-3 for v in slopes)
        return Row(
            "node",
            "NotInjective, 2 limit lines of slope +-1",
            f"NotInjective, {len(exc.spaces)} lines, slopes {[round(v, 4) for v in slopes]}",
            ok,
            {"clusters": len(exc.spaces), "separation": sep},
        )
    return Row("node", "NotInjective, 2 limit lines of slope +-1", "lift succeeded", False)


def _exp_family(row_id: str, name: str, m: int, gb: float, gd: float, expect_coincide: bool) -> Callable[[int], Row]:
    def run(seed: int) -> Row:
        s = spec(name)
        cones = coincide_linearly(s, ORIGIN2, seed=seed)
        samples = sample_pairs(s, ORIGIN2, seed=seed)
        dich = loglip_dichotomy(samples, gb, gd)
        ladder = GAMMA_LADDER if m == 1 else None
        gamma = fit_loglip(sample_pairs(s, ORIGIN2, ladder, seed=seed)).slope
        a = analyze(s, ORIGIN2, seed=seed)
        fit = next(iter(a.fits.values()))
        target = 1 + 1 / m
        ok = (
            dich.passes
            and fit.is_bilip is False
            and abs(gamma - target) <= 0.3
            and cones.coincide_linearly == expect_coincide
            and a.verdict.classification == "not-C1"
        )
        return Row(
            row_id,
            f"gamma* = {target:.3g}: bounded at {gb}, divergent at {gd}; bilip false; "
            f"coincide {_fmt(expect_coincide)}",
            f"growth {dich.bounded_growth:.3g} / {dich.divergent_growth:.3g}, gamma fit {gamma:.3f}, "
            f"bilip {_fmt(fit.is_bilip)}, coincide {_fmt(cones.coincide_linearly)}, {a.verdict.classification}",
            ok,
            {
                "bounded_growth": dich.bounded_growth,
                "divergent_growth": dich.divergent_growth,
                "gamma_hat": gamma,
                "coincide_linearly": cones.coincide_linearly,
            },
        )

    return run


def _region_z(seed: int) -> Row:
    s = spec("Z")
    a = analyze(s, ORIGIN2, seed=seed)
    ok = (
        a.verdict.classification == "criterion-inapplicable"
        and not a.cones.coincide_linearly
        and any("not a C1" in n for n in a.verdict.notes)
    )
    return Row(
        "Z",
        "criterion-inapplicable, coincide false, not-C1 note",
        f"{a.verdict.classification}, coincide {_fmt(a.cones.coincide_linearly)}",
        ok,
        {"verdict": a.verdict.classification},
    )


def _x_abs_x(seed: int) -> Row:
    a = analyze(spec("x_abs_x"), ORIGIN2, seed=seed)
    fit = next(iter(a.fits.values()))
    ok = fit.is_bilip is True
    return Row("x_abs_x", "bilip true", f"bilip {_fmt(fit.is_bilip)}, {a.verdict.classification}", ok)


def _parity(name: str, base, expected: int) -> Callable[[int], Row]:
    def run(seed: int) -> Row:
        got = multiplicity_mod2(spec(name), base, seed=seed)
        return Row(f"parity_{name}", f"parity {expected}", f"parity {got}", got == expected)

    return run


def _lemmas(seed: int) -> Row:
    tails = {}
    ok = True
    for g in LEMMA_FUNCTIONS:
        r = verify_lemma_ratio(g)
        q = verify_lemma_loglip(g)
        tails[g] = [r.tail, q.tail]
        ok = ok and r.passes and q.passes
    measured = "; ".join(f"{g}: {a:.2g}, {b:.3g}" for g, (a, b) in tails.items())
    return Row("lemmas", "g/g' tail < 1e-3, |g'/(g log g)| tail > 1e3, monotone", measured, ok)


def _inequality(seed: int) -> Row:
    rng = np.random.default_rng(seed)
    trials, lam = 100_000, 4.0
    z = rng.uniform(-1, 1, (trials, 2))
    margins = []
    for _ in range(2):
        a = rng.uniform(-0.5, 0.5, (trials, 2, 2))
        a = 0.5 * (a + np.swapaxes(a, 1, 2))
        b = rng.uniform(-0.5, 0.5, (trials, 2))
        margins.append((np.einsum("nij,nj->ni", 2 * a, z) + b)[:, None, :])
    worst = float(tangent_inequality_margins(margins[0], margins[1], lam).min())
    return Row("tangent_inequality", "min margin >= -1e-12 over 1e5 trials", f"min margin {worst:.3g}", worst >= -1e-12)


def _oracle(seed: int) -> Row:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n, d in ((2, 1), (3, 1), (4, 2)):
        for _ in range(20):
            a, b = random_subspace(n, d, rng), random_subspace(n, d, rng)
            worst = max(worst, abs(delta(a, b) - hausdorff_delta_oracle(a, b, 10_000, seed=seed)))
    return Row("grassmannian", "|delta - oracle| <= 1e-3", f"max gap {worst:.3g}", worst <= 1e-3)


SUITE: dict[str, Callable[[int], Row]] = {
    "cusp": _cusp,
    "cusp_complex": _cusp_complex,
    "complex_line": _complex_line,
    "Xk_k=1": _xk(1),
    "Xk_k=2": _xk(2),
    "Xk_k=3": _xk(3),
    "Yk_k=1": _yk(1),
    "Yk_k=2": _yk(2),
    "f_pm_m=1": _exp_family("f_pm_m=1", "f_pm", 1, 2.2, 1.5, True),
    "h_pm_m=2": _exp_family("h_pm_m=2", "h_pm2", 2, 1.7, 1.0, True),
    "g_pm_m=2": _exp_family("g_pm_m=2", "g_pm2", 2, 1.7, 1.0, False),
    "Z": _region_z,
    "circle": _circle,
    "node": _node,
    "x_abs_x": _x_abs_x,
    "parity_cusp": _parity("cusp", ORIGIN2, 0),
    "parity_X2": _parity("X2", ORIGIN2, 0),
    "parity_circle": _parity("circle", (1.0, 0.0), 1),
    "lemmas": _lemmas,
    "tangent_inequality": _inequality,
    "grassmannian": _oracle,
}


def run_example_suite(only=None, seed: int = 0) -> list[Row]:
    ids = list(SUITE) if not only else list(only)
    unknown = [i for i in ids if i not in SUITE]
    if unknown:
        raise KeyError(f"unknown example id(s): {', '.join(unknown)}; known: {', '.join(SUITE)}")
    rows = []
    for i in ids:
        try:
            row = SUITE[i](seed)
        except NashLabError as exc:
            row = Row(i, "(see suite definition)", f"{type(exc).__name__}: {exc}", False)
        row.id = i
        rows.append(row)
    return rows


def format_table(rows: list[Row]) -> str:
    width = max(len(r.id) for r in rows) if rows else 4
    lines = [f"{'example'.ljust(width)}  result  measured  (expected)"]
    for r in rows:
        lines.append(f"{r.id.ljust(width)}  {'PASS' if r.passed else 'FAIL'}    {r.measured}  ({r.expected})")
    return "\n".join(lines)
