from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nashlab.errors import ParseError, UnknownVariable
from nashlab.poly import Polynomial, format_polynomial, parse_equation, parse_polynomial

XY = ["x", "y"]


def test_canonical_text_is_graded_lex():
    p = parse_polynomial("(x+y)^2 - 3/2*x", XY)
    assert format_polynomial(p, XY) == "x^2 + 2*x*y + y^2 - 3/2*x"


def test_equation_moves_rhs_to_left():
    assert format_polynomial(parse_equation("x^2 = y^3", XY), XY) == "-y^3 + x^2"


def test_exact_evaluation():
    p = parse_polynomial("x^2 + 2*x*y + y^2 - 3/2*x", XY)
    assert p.evaluate_exact([1, 2]) == Fraction(15, 2)
    assert p.evaluate([1.0, 2.0]) == pytest.approx(7.5)


def test_restriction_to_a_line():
    p = parse_polynomial("(x+y)^2 - 3/2*x", XY)
    assert p.restrict_to_line([0, 0], [1, 1]) == [0, Fraction(-3, 2), 4]


def test_initial_form_of_node():
    q = parse_equation("y^2 = x^2*(x+1)", XY)
    assert format_polynomial(q.initial_form([0, 0]), XY) == "-x^2 + y^2"


def test_gradient_of_cusp():
    g = parse_equation("x^2 = y^3", XY).gradient()
    assert [format_polynomial(c, XY) for c in g] == ["2*x", "-3*y^2"]


@pytest.mark.parametrize("text", ["x^", "x^-1", "2*(x", "x ++", ""])
def test_malformed_text_raises(text):
    with pytest.raises(ParseError):
        parse_polynomial(text, XY)


def test_unknown_variable_reports_position():
    with pytest.raises(UnknownVariable) as info:
        parse_polynomial("x + z", XY)
    assert info.value.pos == 4


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=7)
monomials = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coeff, max_size=6)


@settings(max_examples=60, deadline=None)
@given(monomials)
def test_format_parse_roundtrip(terms):
    p = Polynomial(2, terms)
    again = parse_polynomial(format_polynomial(p, XY), XY)
    assert again.terms == p.terms


@settings(max_examples=40, deadline=None)
@given(monomials, st.tuples(coeff, coeff), st.tuples(coeff, coeff))
def test_translation_matches_evaluation(terms, base, point):
    p = Polynomial(2, terms)
    shifted = p.translate(base)
    assert shifted.evaluate_exact(point) == p.evaluate_exact([point[0] + base[0], point[1] + base[1]])
