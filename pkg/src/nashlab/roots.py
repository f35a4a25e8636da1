"""Exact real root isolation for univariate rational polynomials.

Coefficient lists run from the constant term upward.  Isolation uses Sturm
sequences of the squarefree part, so it never misses or double counts a real
root; refinement bisects with exact sign tests at floating-point split points
until the bracket is one ulp wide.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Coeffs = list  # list[Fraction], low degree first


def trim(c: Sequence[Fraction]) -> Coeffs:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def derivative(c: Sequence[Fraction]) -> Coeffs:
    return [k * c[k] for k in range(1, len(c))]


def evaluate(c: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for a in reversed(c):
        acc = acc * x + a
    return acc


def sign_at(c: Sequence[Fraction], x) -> int:
    v = evaluate(c, Fraction(x))
    return (v > 0) - (v < 0)


def divmod_poly(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Coeffs, Coeffs]:
    a = trim(a)
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        f = a[-1] / lead
        q[shift] = f
        for i, bc in enumerate(b):
            a[i + shift] -= f * bc
        a = trim(a)
    return trim(q), a


def monic(c: Sequence[Fraction]) -> Coeffs:
    c = trim(c)
    return [a / c[-1] for a in c] if c else c


def gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> Coeffs:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return monic(a)


def squarefree(c: Sequence[Fraction]) -> tuple[Coeffs, Coeffs]:
    """Return ``(squarefree part, gcd(c, c'))``."""
    c = trim(c)
    g = gcd(c, derivative(c))
    if len(g) <= 1:
        return monic(c), [Fraction(1)]
    return monic(divmod_poly(c, g)[0]), g


def sturm_chain(c: Sequence[Fraction]) -> list[Coeffs]:
    chain = [trim(c), derivative(trim(c))]
    while len(chain[-1]) > 1:
        r = divmod_poly(chain[-2], chain[-1])[1]
        if not r:
            break
        chain.append([-a for a in r])
    return [p for p in chain if p]


def _variations(chain: list[Coeffs], x: Fraction) -> int:
    count = 0
    prev = 0
    for p in chain:
        s = sign_at(p, x)
        if s:
            if prev and s != prev:
                count += 1
            prev = s
    return count


def count_roots(chain: list[Coeffs], a, b) -> int:
    """Number of distinct real roots in ``(a, b]`` (chain of a squarefree poly)."""
    return _variations(chain, Fraction(a)) - _variations(chain, Fraction(b))


def _split_point(p: Coeffs, a: float, b: float) -> float:
    """A float strictly inside (a, b) that is not a root of ``p``."""
    for frac in (0.5, 0.5 + 1 / 64, 0.5 - 1 / 64, 0.25, 0.75, 1 / 3, 2 / 3):
        m = a + (b - a) * frac
        if a < m < b and sign_at(p, m) != 0:
            return m
    return a + (b - a) * 0.5


def isolate(c: Sequence[Fraction], lo: float, hi: float) -> list[tuple[float, float]]:
    """Brackets ``(a, b]``, each holding exactly one distinct real root in ``(lo, hi]``."""
    p = squarefree(c)[0]
    if len(p) <= 1:
        return []
    chain = sturm_chain(p)
    out: list[tuple[float, float]] = []
    stack = [(float(lo), float(hi), count_roots(chain, lo, hi))]
    while stack:
        a, b, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            out.append((a, b))
            continue
        m = _split_point(p, a, b)
        if not a < m < b:
            # interval already at float resolution; keep it as one bracket
            out.append((a, b))
            continue
        left = count_roots(chain, a, m)
        stack.append((m, b, k - left))
        stack.append((a, m, left))
    out.sort()
    return out


def refine(p: Coeffs, a: float, b: float) -> float:
    """Shrink a single-root bracket ``(a, b]`` of squarefree ``p`` to float resolution."""
    if sign_at(p, b) == 0:
        return b
    sb = sign_at(p, b)
    while True:
        if a > 0 and b > 4 * a:
            m = math.sqrt(a * b)
        elif b < 0 and a < 4 * b:
            m = -math.sqrt(a * b)
        else:
            m = a + (b - a) * 0.5
        if not a < m < b:
            break
        sm = sign_at(p, m)
        if sm == 0:
            return m
        if sm == sb:
            b = m
        else:
            a = m
    return b if abs(evaluate(p, Fraction(b))) <= abs(evaluate(p, Fraction(a))) else a


def real_roots(c: Sequence[Fraction], lo: float, hi: float) -> tuple[list[float], list[float]]:
    """Distinct real roots of ``c`` in ``(lo, hi]``.

    Returns ``(roots, multiple)`` where ``multiple`` lists the roots that are
    repeated roots of ``c`` itself (fiber tangent to the variety).
    """
    c = trim(c)
    if not c:
        raise ValueError("zero polynomial has no isolated roots")
    p, g = squarefree(c)
    roots = [refine(p, a, b) for a, b in isolate(p, lo, hi)]
    multiple = []
    if len(g) > 1:
        for r in roots:
            eps = max(abs(r), 1e-300) * 1e-9
            if _near_root(g, r, eps):
                multiple.append(r)
    return roots, multiple


def _near_root(g: Coeffs, r: float, eps: float) -> bool:
    if len(g) <= 1:
        return False
    return count_roots(sturm_chain(squarefree(g)[0]), r - eps, r + eps) > 0
