"""Variety descriptions: implicit curves, complex plane curves, graph families, regions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import NotOnVariety, ParseError, UnsupportedSpec
from .expr import Expr, LogValue, parse_expression
from .poly import Polynomial, format_polynomial, parse_equation

KINDS = ("implicit-real", "implicit-complex", "parametric-graphs", "region")

# relative residual accepted for a base point that is "on" an implicit variety
ON_VARIETY_RTOL = 1e-9


@dataclass(frozen=True)
class Graph:
    """A graph y = h(x) over the open interval ``domain``.

    ``shift`` re-centres the graph: the local graph is
    ``xi -> h(xi + shift[0]) - shift[1]``.
    """

    expr: Expr
    text: str
    domain: tuple[float, float]
    shift: tuple[float, float] = (0.0, 0.0)
    slope_expr: Expr = field(default=None, compare=False)

    def __post_init__(self):
        if self.slope_expr is None:
            object.__setattr__(self, "slope_expr", self.expr.diff())

    def contains(self, xi: float) -> bool:
        a, b = self.domain
        x = xi + self.shift[0]
        return a < x < b

    def on_closure(self, xi: float) -> bool:
        a, b = self.domain
        x = xi + self.shift[0]
        return a <= x <= b

    def _global_x(self, xi: float) -> float:
        x = xi + self.shift[0]
        a, b = self.domain
        # one-sided limit at a closed endpoint
        span = b - a
        if x <= a:
            x = a + 1e-9 * span
        elif x >= b:
            x = b - 1e-9 * span
        return x

    def value(self, xi: float) -> float:
        x = self._global_x(xi)
        try:
            return self.expr.evaluate(x) - self.shift[1]
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise UnsupportedSpec(f"graph {self.text!r} not evaluable at x={x}: {exc}") from None

    def slope(self, xi: float) -> float:
        x = self._global_x(xi)
        try:
            return self.slope_expr.evaluate(x)
        except (ZeroDivisionError, ValueError, OverflowError) as exc:
            raise UnsupportedSpec(f"slope of {self.text!r} not evaluable at x={x}: {exc}") from None

    def log_value(self, xi: float) -> LogValue:
        """Unshifted ``h`` at the global abscissa, as a log-magnitude."""
        return self.expr.evaluate_log(self._global_x(xi))

    def log_slope(self, xi: float) -> LogValue:
        return self.slope_expr.evaluate_log(self._global_x(xi))

    def shifted(self, dx: float, dy: float) -> "Graph":
        return Graph(
            self.expr,
            self.text,
            self.domain,
            (self.shift[0] + dx, self.shift[1] + dy),
            self.slope_expr,
        )


@dataclass(frozen=True)
class VarietySpec:
    kind: str
    variables: tuple[str, ...]
    equation: Polynomial | None = None
    graphs: tuple[Graph, ...] = ()
    ambient_dim: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedSpec(f"unknown variety kind {self.kind!r}")
        if self.kind in ("implicit-real", "implicit-complex", "region"):
            if self.equation is None:
                raise UnsupportedSpec(f"{self.kind} spec needs an equation")
            if self.equation.num_vars != self.ambient_dim:
                raise UnsupportedSpec("equation variables do not match ambient_dim")
        if self.kind == "implicit-complex" and self.ambient_dim != 2:
            raise UnsupportedSpec("implicit-complex specs are plane curves (ambient_dim 2)")
        if self.kind == "parametric-graphs":
            if not self.graphs:
                raise UnsupportedSpec("parametric-graphs spec needs at least one graph")
            if self.ambient_dim != 2:
                raise UnsupportedSpec("parametric graphs live in the plane")

    @property
    def real_dim(self) -> int:
        """Real dimension of the ambient space."""
        return 2 * self.ambient_dim if self.kind == "implicit-complex" else self.ambient_dim

    @property
    def set_dim(self) -> int:
        if self.kind == "implicit-real":
            return self.ambient_dim - 1
        if self.kind == "implicit-complex":
            return 2
        if self.kind == "parametric-graphs":
            return 1
        return self.ambient_dim

    @property
    def is_complex(self) -> bool:
        return self.kind == "implicit-complex"

    # documents

    @classmethod
    def from_document(cls, doc: dict[str, Any]) -> "VarietySpec":
        if not isinstance(doc, dict):
            raise UnsupportedSpec("spec document must be a JSON object")
        kind = doc.get("kind")
        if kind not in KINDS:
            raise UnsupportedSpec(f"'kind' must be one of {KINDS}, got {kind!r}")
        variables = tuple(doc.get("variables") or ("x", "y"))
        n = int(doc.get("ambient_dim", len(variables)))
        if len(variables) != n:
            raise UnsupportedSpec("'variables' length must equal 'ambient_dim'")
        if kind == "parametric-graphs":
            graphs = []
            for i, g in enumerate(doc.get("graphs") or []):
                try:
                    a, b = (float(v) for v in g["domain"])
                    expr = parse_expression(g["expr"], variables[0])
                except KeyError as exc:
                    raise UnsupportedSpec(f"graphs[{i}] is missing {exc}") from None
                except ParseError as exc:
                    raise ParseError(f"graphs[{i}].expr: {exc}") from None
                if not a < b:
                    raise UnsupportedSpec(f"graphs[{i}] has an empty domain")
                graphs.append(Graph(expr, g["expr"], (a, b)))
            return cls(kind, variables, graphs=tuple(graphs), ambient_dim=n)
        text = doc.get("equation", doc.get("inequality"))
        if not isinstance(text, str):
            raise UnsupportedSpec(f"{kind} spec needs an 'equation' string")
        try:
            equation = parse_equation(text, variables)
        except ParseError as exc:
            raise ParseError(f"equation: {exc}") from None
        return cls(kind, variables, equation=equation, ambient_dim=n)

    def to_document(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind, "variables": list(self.variables)}
        if self.equation is not None:
            doc["equation"] = format_polynomial(self.equation, self.variables)
        if self.graphs:
            doc["graphs"] = [{"expr": g.text, "domain": list(g.domain)} for g in self.graphs]
        doc["ambient_dim"] = self.ambient_dim
        return doc

    # points

    def residual(self, point: Sequence[float]) -> float:
        """Relative defect of ``point`` (0 on the variety)."""
        point = np.asarray(point, dtype=float)
        if self.kind == "parametric-graphs":
            best = math.inf
            for g in self.graphs:
                if g.on_closure(point[0]):
                    best = min(best, abs(g.value(point[0]) - point[1]))
            return best
        if self.kind == "implicit-complex":
            z = complex_coords(point, self.ambient_dim)
            val = abs(self.equation.evaluate(z))
            scale = self.equation.evaluate_abs([abs(c) for c in z])
        else:
            val = self.equation.evaluate(list(point))
            scale = self.equation.evaluate_abs(list(point))
            if self.kind == "region":
                return max(val, 0.0) / max(scale, 1.0)
            val = abs(val)
        return val / max(scale, 1.0)

    def check_point(self, point: Sequence[float], tol: float = ON_VARIETY_RTOL):
        point = np.asarray(point, dtype=float)
        if point.shape != (self.real_dim,):
            raise NotOnVariety(
                f"point has {point.size} coordinates, expected {self.real_dim}"
            )
        r = self.residual(point)
        if not r <= tol:
            raise NotOnVariety(f"point {point.tolist()} is off the variety (residual {r:.3g})")
        return point

    def localize(self, base: Sequence[float]) -> "VarietySpec":
        """Translate so that ``base`` becomes the origin.

        Implicit equations are translated exactly; a rounding-level constant
        left over from an inexact base point is dropped.
        """
        base = self.check_point(base)
        if self.kind == "parametric-graphs":
            return VarietySpec(
                self.kind,
                self.variables,
                graphs=tuple(g.shifted(base[0], base[1]) for g in self.graphs),
                ambient_dim=self.ambient_dim,
            )
        if self.kind == "implicit-complex":
            if np.any(base[self.ambient_dim:] != 0):
                raise UnsupportedSpec("complex base points must have real coordinates")
            shift = [Fraction(float(b)) for b in base[: self.ambient_dim]]
        else:
            shift = [Fraction(float(b)) for b in base]
        local = self.equation.translate(shift)
        const = (0,) * local.num_vars
        terms = local.terms
        if const in terms and self.kind != "region":
            del terms[const]
            local = Polynomial(local.num_vars, terms)
        return VarietySpec(self.kind, self.variables, equation=local, ambient_dim=self.ambient_dim)


def complex_coords(point: Sequence[float], n: int) -> list[complex]:
    """(Re z_1..Re z_n, Im z_1..Im z_n) -> [z_1..z_n]."""
    return [complex(point[k], point[n + k]) for k in range(n)]


def realify(z: Sequence[complex]) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag])
