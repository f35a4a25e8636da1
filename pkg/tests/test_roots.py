from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nashlab.roots import count_roots, real_roots, squarefree, sturm_chain


def poly_from_roots(roots):
    c = [F(1)]
    for r in roots:
        nxt = [F(0)] * (len(c) + 1)
        for i, v in enumerate(c):
            nxt[i] -= r * v
            nxt[i + 1] += v
        c = nxt
    return c


def test_simple_roots():
    roots, multiple = real_roots([F(-2), F(0), F(1)], -3, 3)
    assert roots == pytest.approx([-2**0.5, 2**0.5], abs=1e-14)
    assert multiple == []


def test_double_root_is_flagged():
    roots, multiple = real_roots(poly_from_roots([F(1), F(1), F(-1, 3)]), -3, 3)
    assert roots == pytest.approx([-1 / 3, 1.0])
    assert multiple == pytest.approx([1.0])


def test_sturm_count_on_half_open_interval():
    chain = sturm_chain(poly_from_roots([F(0), F(1, 2), F(2)]))
    assert count_roots(chain, F(0), F(1)) == 1  # (0, 1] excludes 0
    assert count_roots(chain, F(-1), F(3)) == 3


def test_squarefree_part():
    sq, g = squarefree(poly_from_roots([F(2), F(2), F(-1)]))
    assert len(sq) == 3 and len(g) == 2


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=9), min_size=1, max_size=6, unique=True))
def test_isolation_recovers_rational_roots(rs):
    roots, _ = real_roots(poly_from_roots(rs), -5, 5)
    assert np.allclose(roots, sorted(float(r) for r in rs), atol=1e-12)
