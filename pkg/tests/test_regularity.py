import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nashlab.corpus import ORIGIN2, spec
from nashlab.errors import DerivativeBoundViolated, DomainViolation, InsufficientScales, ScaleTooLarge, SingleBranch
from nashlab.regularity import (
    CLASSIFICATIONS,
    CROSS,
    WITHIN,
    PairSample,
    analyze,
    bilip_test,
    classify,
    fit_holder,
    fit_loglip,
    fit_modulus,
    k_tilde,
    loglip_dichotomy,
    sample_pairs,
    tangent_inequality_margins,
    verify_lemma_loglip,
    verify_lemma_ratio,
)
from nashlab.sampler import ScaleLadder

ZERO = np.zeros(2)


def synthetic(nash_of_dist, dists):
    return [
        PairSample(ZERO, ZERO, math.log(d), math.log(nash_of_dist(d)), d, CROSS) for d in dists
    ]


DISTS = [0.1 * 2.0**-j for j in range(14)]


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(0.2, 5.0))
def test_power_law_is_recovered(alpha, c):
    fit = fit_holder(synthetic(lambda d: c * d**alpha, DISTS))
    assert fit.slope == pytest.approx(alpha, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 0.9), st.floats(0.0, 0.5))
def test_sandwiched_modulus_gives_exponent_between_bounds(alpha, wobble):
    # nash_dist oscillates between d^alpha and 2 d^alpha: the fitted slope stays near alpha
    samples = synthetic(lambda d: d**alpha * (1 + wobble * (1 + math.sin(40 * math.log(d))) / 2), DISTS)
    assert abs(fit_holder(samples).slope - alpha) < 0.1


def test_log_lipschitz_exponent_is_recovered():
    samples = synthetic(lambda d: d * (-math.log(d)) ** 1.5, [1e-3 * 2.0**-j for j in range(20)])
    assert fit_loglip(samples).slope == pytest.approx(1.5, abs=1e-9)
    dich = loglip_dichotomy(samples, 1.7, 1.0)
    assert dich.bounded_growth <= 1.0 + 1e-12
    # |log d|^0.5 grows only by sqrt(3) over this ladder: too slow to count as divergence
    assert dich.divergent_growth == pytest.approx(math.sqrt(math.log(1e-3 * 2.0**-19) / math.log(1e-3)))
    assert not dich.passes


def test_dichotomy_separates_a_wide_gap():
    samples = synthetic(lambda d: d * (-math.log(d)) ** 3, [1e-3 * 2.0**-j for j in range(20)])
    dich = loglip_dichotomy(samples, 3.2, 0.5)
    assert dich.passes and dich.divergent_growth > 10


def test_lipschitz_samples_are_bilipschitz():
    res = bilip_test(synthetic(lambda d: 3 * d, DISTS))
    assert res.is_bilip and res.max_ratio == pytest.approx(3)


def test_holder_samples_are_not_bilipschitz():
    res = bilip_test(synthetic(lambda d: d ** (1 / 3), DISTS))
    assert not res.is_bilip
    assert res.ratio_slope == pytest.approx(-2 / 3)


def test_fit_guards():
    with pytest.raises(InsufficientScales):
        fit_holder(synthetic(lambda d: d, DISTS[:3]))
    with pytest.raises(InsufficientScales):
        fit_holder(synthetic(lambda d: d, [0.1, 0.09, 0.08, 0.07, 0.06, 0.05]))
    with pytest.raises(ScaleTooLarge):
        fit_loglip(synthetic(lambda d: d, [0.9 * 2.0**-j for j in range(12)]))


def test_cusp_pairs_follow_the_parametrisation():
    for s in sample_pairs(spec("cusp"), ORIGIN2):
        y = s.p[1]
        assert s.q[1] == pytest.approx(y)
        assert s.dist == pytest.approx(2 * y**1.5, rel=1e-9)
        assert s.nash_dist >= s.dist


def test_X2_pairs_match_branch_slopes():
    for s in sample_pairs(spec("X2"), ORIGIN2)[-4:]:
        x = abs(s.p[0])
        assert s.dist == pytest.approx(2 * x**2.5, rel=1e-6)
        # chordal gap of the slopes +-(5/2) x^(3/2) is about 5 x^(3/2)
        assert s.nash_dist == pytest.approx(5 * x**1.5, rel=1e-2)


def test_circle_pairs_have_ratio_near_one():
    samples = sample_pairs(spec("circle"), (1.0, 0.0), strategy=WITHIN)
    assert max(s.nash_dist / s.dist for s in samples) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(SingleBranch):
        sample_pairs(spec("circle"), (1.0, 0.0), strategy=CROSS)


def test_modulus_fit_invariants():
    fit = fit_modulus(sample_pairs(spec("X1"), ORIGIN2), CROSS)
    assert 0 < fit.alpha_hat <= 1.05
    assert 0 <= fit.r_squared_alpha <= 1
    assert fit.to_json()["alpha_label"] == "fitted"


def test_k_tilde_value():
    assert k_tilde(4.0) == pytest.approx(math.sqrt(2) / (8 * math.sqrt(17)))


def test_inequality_rejects_steep_graphs():
    with pytest.raises(DerivativeBoundViolated):
        tangent_inequality_margins(np.full((1, 1, 1), 5.0), np.zeros((1, 1, 1)), 4.0)


def test_inequality_is_tight_for_lines_through_origin():
    margins = tangent_inequality_margins(np.zeros((1, 1, 1)), np.full((1, 1, 1), 0.01), 1.0)
    assert margins[0] > 0


def test_lemma_checks():
    assert verify_lemma_ratio("t^3*exp(-1/t)").passes
    assert verify_lemma_loglip("t^(5/2)").passes
    assert not verify_lemma_ratio("exp(t)").passes
    with pytest.raises(DomainViolation):
        verify_lemma_loglip("2 + t")


@pytest.mark.parametrize(
    "name, base, expected",
    [
        ("cusp", ORIGIN2, "not-C1"),
        ("circle", (1.0, 0.0), "C11-submanifold"),
        ("node", ORIGIN2, "eta-not-injective"),
        ("Z", ORIGIN2, "criterion-inapplicable"),
        ("X3", ORIGIN2, "not-C1"),
    ],
)
def test_verdicts(name, base, expected):
    v = classify(spec(name), base)
    assert v.classification == expected
    assert v.classification in CLASSIFICATIONS
    assert v.evidence  # every verdict cites evidence


def test_errors_become_inapplicable_verdicts():
    a = analyze(spec("cusp"), ORIGIN2, ScaleLadder((0.1, 0.05, 0.025)))
    assert a.verdict.classification == "criterion-inapplicable"
    assert a.verdict.evidence[0][0] == "error"
