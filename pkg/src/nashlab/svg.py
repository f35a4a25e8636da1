"""Standalone SVG output: log-log modulus plots and renderings of plane sets."""

from __future__ import annotations

import math
import warnings
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .errors import NashLabError
from .sampler import fiber_points
from .variety import VarietySpec

PANEL_W, PANEL_H, MARGIN = 420, 320, 48
COLORS = ("#c0392b", "#2c7fb8", "#27ae60", "#8e44ad", "#d35400")


class _Panel:
    def __init__(self, x0: float, xlim, ylim):
        self.x0 = x0
        self.xlim = xlim
        self.ylim = ylim

    def px(self, x: float) -> float:
        a, b = self.xlim
        return self.x0 + MARGIN + (x - a) / (b - a) * (PANEL_W - 2 * MARGIN)

    def py(self, y: float) -> float:
        a, b = self.ylim
        return PANEL_H - MARGIN - (y - a) / (b - a) * (PANEL_H - 2 * MARGIN)

    def frame(self, xlabel: str, ylabel: str, title: str) -> list[str]:
        l, r = self.x0 + MARGIN, self.x0 + PANEL_W - MARGIN
        t, b = MARGIN, PANEL_H - MARGIN
        out = [
            f'<rect x="{l:.1f}" y="{t:.1f}" width="{r - l:.1f}" height="{b - t:.1f}" fill="none" stroke="#333"/>',
            f'<text x="{(l + r) / 2:.1f}" y="{PANEL_H - 12}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
            f'<text x="{self.x0 + 14:.1f}" y="{(t + b) / 2:.1f}" text-anchor="middle" font-size="12" '
            f'transform="rotate(-90 {self.x0 + 14:.1f} {(t + b) / 2:.1f})">{escape(ylabel)}</text>',
            f'<text x="{(l + r) / 2:.1f}" y="{t - 14}" text-anchor="middle" font-size="13">{escape(title)}</text>',
        ]
        for k in range(5):
            xv = self.xlim[0] + k * (self.xlim[1] - self.xlim[0]) / 4
            yv = self.ylim[0] + k * (self.ylim[1] - self.ylim[0]) / 4
            out.append(f'<text x="{self.px(xv):.1f}" y="{b + 14}" text-anchor="middle" font-size="10">{xv:.3g}</text>')
            out.append(f'<text x="{l - 4:.1f}" y="{self.py(yv) + 3:.1f}" text-anchor="end" font-size="10">{yv:.3g}</text>')
        return out


def _padded(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < 1e-12:
        lo, hi = lo - 1, hi + 1
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def loglog_panel(xs: Sequence[float], ys: Sequence[float], slope, intercept, x0: float = 0.0) -> list[str]:
    """Scatter of log10(nash_dist) against log10(dist) with the fitted line."""
    xlim = _padded(min(xs), max(xs))
    ylim = _padded(min(ys), max(ys))
    panel = _Panel(x0, xlim, ylim)
    label = "fitted slope n/a" if slope is None else f"α̂ = {slope:.2f}"
    out = panel.frame("log10 dist", "log10 nash_dist", label)
    for x, y in zip(xs, ys):
        out.append(f'<circle cx="{panel.px(x):.2f}" cy="{panel.py(y):.2f}" r="3" fill="{COLORS[1]}"/>')
    if slope is not None:
        a, b = xlim
        out.append(
            f'<line x1="{panel.px(a):.2f}" y1="{panel.py(slope * a + intercept):.2f}" '
            f'x2="{panel.px(b):.2f}" y2="{panel.py(slope * b + intercept):.2f}" stroke="{COLORS[0]}" stroke-width="1.5"/>'
        )
    return out


def _curve_points(spec: VarietySpec, box: float) -> list[np.ndarray]:
    """Polylines (or dot clouds) tracing a real plane set inside [-box, box]^2."""
    if spec.kind == "parametric-graphs":
        lines = []
        for g in spec.graphs:
            a, b = max(g.domain[0], -box), min(g.domain[1], box)
            xs = np.linspace(a, b, 241)[1:-1]
            pts = []
            for x in xs:
                try:
                    pts.append((x, g.value(x)))
                except NashLabError:
                    continue
            if pts:
                lines.append(np.array(pts))
        return lines
    if spec.kind == "implicit-real" and spec.ambient_dim == 2:
        dots = []
        for u in ((1.0, 0.0), (0.0, 1.0)):
            for v in np.linspace(-box, box, 161):
                try:
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        fib = fiber_points(spec, u, float(v), box * math.sqrt(2))
                except NashLabError:
                    continue
                dots.extend(p for p in fib.points if np.all(np.abs(p) <= box))
        return [np.array(dots).reshape(-1, 2)] if dots else []
    if spec.kind == "region" and spec.ambient_dim == 2:
        grid = np.linspace(-box, box, 81)
        dots = [(x, y) for x in grid for y in grid if spec.equation.evaluate([x, y]) <= 0]
        return [np.array(dots).reshape(-1, 2)] if dots else []
    return []


def set_panel(spec: VarietySpec, x0: float = 0.0, box: float = 1.2) -> list[str]:
    panel = _Panel(x0, (-box, box), (-box, box))
    out = panel.frame("x", "y", f"{spec.kind} set")
    # axes
    out.append(f'<line x1="{panel.px(-box):.1f}" y1="{panel.py(0):.1f}" x2="{panel.px(box):.1f}" y2="{panel.py(0):.1f}" stroke="#aaa"/>')
    out.append(f'<line x1="{panel.px(0):.1f}" y1="{panel.py(-box):.1f}" x2="{panel.px(0):.1f}" y2="{panel.py(box):.1f}" stroke="#aaa"/>')
    for k, pts in enumerate(_curve_points(spec, box)):
        color = COLORS[k % len(COLORS)] if spec.kind == "parametric-graphs" else COLORS[0]
        if spec.kind == "parametric-graphs":
            path = " ".join(f"{panel.px(x):.2f},{panel.py(y):.2f}" for x, y in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="2"/>')
        else:
            r = 1.2 if spec.kind != "region" else 1.8
            for x, y in pts:
                out.append(f'<circle cx="{panel.px(x):.2f}" cy="{panel.py(y):.2f}" r="{r}" fill="{color}"/>')
    return out


def document(parts: list[str], panels: int) -> str:
    width = PANEL_W * panels
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL_H}" '
        f'viewBox="0 0 {width} {PANEL_H}" font-family="sans-serif">'
    )
    return "\n".join([head, f'<rect width="{width}" height="{PANEL_H}" fill="white"/>', *parts, "</svg>"]) + "\n"


def report_svg(report: dict) -> str:
    """Two panels: the modulus fit of the report, and the set itself when it is a real plane set."""
    samples = next(iter(report.get("samples", {}).values()), [])
    fit = next(iter(report.get("fits", {}).values()), {})
    finite = [s for s in samples if isinstance(s["log_dist"], float) and isinstance(s["log_nash_dist"], float)]
    if len(finite) < 6:
        raise ValueError("a modulus plot needs at least 6 samples")
    ln10 = math.log(10)
    xs = [s["log_dist"] / ln10 for s in finite]
    ys = [s["log_nash_dist"] / ln10 for s in finite]
    slope = fit.get("alpha_raw")
    intercept = None
    if slope is not None:
        # least-squares intercept on the same finest rungs used by the fit
        scales = sorted({s["scale"] for s in finite})[:6]
        sel = [(x, y) for x, y, s in zip(xs, ys, finite) if s["scale"] in scales]
        intercept = float(np.mean([y for _, y in sel]) - slope * np.mean([x for x, _ in sel]))
    parts = loglog_panel(xs, ys, slope, intercept)
    panels = 1
    spec = VarietySpec.from_document(report["spec"])
    if not spec.is_complex:
        parts += set_panel(spec, x0=PANEL_W)
        panels = 2
    return document(parts, panels)


def emit_plot(report: dict, path: str) -> None:
    text = report_svg(report)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
