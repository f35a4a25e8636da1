import math

import pytest

from nashlab.errors import ParseError
from nashlab.expr import LogValue, parse_expression


def test_values_of_flat_function():
    e = parse_expression("x^3*exp(-1/x)", "x")
    assert e.evaluate(0.5) == pytest.approx(0.125 * math.exp(-2))


def test_log_evaluation_survives_underflow():
    e = parse_expression("x^3*exp(-1/x)", "x")
    lv = e.evaluate_log(1e-3)
    assert lv.sign == 1
    assert lv.log == pytest.approx(3 * math.log(1e-3) - 1000)
    assert e.evaluate(1e-3) == 0.0  # plain floats underflow here


@pytest.mark.parametrize(
    "text, x",
    [("x^2", 0.3), ("x^(5/2)", 0.7), ("x^3*exp(-1/x^2)", 0.9), ("log(x)*x", 0.4), ("(x+1)/(x-2)", 0.25)],
)
def test_symbolic_derivative_matches_central_difference(text, x):
    e = parse_expression(text, "x")
    h = 1e-6
    numeric = (e.evaluate(x + h) - e.evaluate(x - h)) / (2 * h)
    assert e.diff().evaluate(x) == pytest.approx(numeric, rel=1e-6)


def test_text_roundtrip():
    e = parse_expression("-x^3*exp(-1/x)", "x")
    assert parse_expression(e.text(), "x").evaluate(0.3) == pytest.approx(e.evaluate(0.3))


def test_logvalue_arithmetic():
    a, b = LogValue.of(3.0), LogValue.of(-0.5)
    assert (a * b).to_float() == pytest.approx(-1.5)
    assert (a / b).to_float() == pytest.approx(-6.0)


@pytest.mark.parametrize("text", ["exp(", "x^", "y + 1", "2**x"])
def test_bad_expressions(text):
    with pytest.raises(ParseError):
        parse_expression(text, "x")
