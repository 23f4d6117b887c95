"""Self-contained SVG phase portraits with byte-stable output."""

import math

import numpy as np

from .errors import PreconditionError
from .report import AnalysisReport

SIZE = 600
MARGIN = 40
MAX_POINTS = 4000
PALETTE = ("#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

STYLE = """\
.axis { stroke: #444; stroke-width: 1; }
.trapping-disk { fill: none; stroke: #888; stroke-width: 1.2; stroke-dasharray: 6 4; }
.limit-cycle { fill: none; stroke: #d62728; stroke-width: 3; }
.origin { fill: #000; }
.label { font: 12px sans-serif; fill: #222; }
"""


def _xy(obj):
    """``(n, 2)`` array of phase-plane points from an array, Trajectory or samples."""
    if hasattr(obj, "u") and hasattr(obj, "t"):
        pts = np.asarray(obj.u, dtype=float)[:, :2]
    else:
        pts = np.asarray(obj, dtype=float)
        if pts.ndim != 2 or pts.shape[1] < 2:
            raise PreconditionError("a trajectory must be an (n, 2) or (n, 3) array")
        # (t, x, y) rows carry time in the first column
        pts = pts[:, 1:3] if pts.shape[1] == 3 else pts[:, :2]
    if len(pts) == 0:
        raise PreconditionError("empty trajectory")
    if len(pts) > MAX_POINTS:
        pts = pts[np.linspace(0, len(pts) - 1, MAX_POINTS).round().astype(int)]
    return pts


def _fmt(v):
    return f"{v:.3f}"


def _points_attr(pts, tf):
    return " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in (tf(x, y) for x, y in pts))


def render_svg(trajectories=(), cycle=None, sigma=None, title=""):
    """SVG text for the given curves.

    Parameters
    ----------
    trajectories : sequence
        Each an ``(n, 2)`` array of ``(x, y)``, an ``(n, 3)`` array of
        ``(t, x, y)`` or a :class:`~limcyc.dynamics.Trajectory`.
    cycle : array_like, optional
        One period of the limit cycle; drawn closed and highlighted.
    sigma : float, optional
        Radius of the trapping disk, drawn dashed.
    """
    trajs = [_xy(t) for t in trajectories]
    cyc = _xy(cycle) if cycle is not None else None
    if not trajs and cyc is None:
        raise PreconditionError("nothing to plot: no trajectory and no cycle")
    extent = max(float(np.max(np.abs(p))) for p in trajs + ([cyc] if cyc is not None else []))
    if sigma:
        extent = max(extent, float(sigma))
    extent = 1.1 * extent if extent > 0 else 1.0
    scale = (SIZE / 2 - MARGIN) / extent
    c = SIZE / 2

    def tf(x, y):
        return c + x * scale, c - y * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
        f"<style>\n{STYLE}</style>",
        f'<rect width="{SIZE}" height="{SIZE}" fill="#fff"/>',
        f'<line class="axis" x1="{MARGIN}" y1="{_fmt(c)}" x2="{SIZE - MARGIN}" y2="{_fmt(c)}"/>',
        f'<line class="axis" x1="{_fmt(c)}" y1="{MARGIN}" x2="{_fmt(c)}" y2="{SIZE - MARGIN}"/>',
        f'<text class="label" x="{SIZE - MARGIN + 4}" y="{_fmt(c + 4)}">x</text>',
        f'<text class="label" x="{_fmt(c - 4)}" y="{MARGIN - 6}">y</text>',
        f'<text class="label" x="{MARGIN}" y="{SIZE - 12}">|x|, |y| &lt;= {extent:.4g}</text>',
    ]
    if title:
        safe = title.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        out.append(f'<text class="label" x="{MARGIN}" y="20">{safe}</text>')
    if sigma:
        out.append(f'<circle class="trapping-disk" cx="{_fmt(c)}" cy="{_fmt(c)}" '
                   f'r="{_fmt(sigma * scale)}"/>')
    for k, pts in enumerate(trajs):
        color = PALETTE[k % len(PALETTE)]
        out.append(f'<polyline class="trajectory trajectory-{k}" fill="none" stroke="{color}" '
                   f'stroke-width="1.2" points="{_points_attr(pts, tf)}"/>')
    if cyc is not None:
        # drop a duplicated closing sample; the polygon closes itself
        if len(cyc) > 1 and math.hypot(*(cyc[0] - cyc[-1])) < 1e-9 * (1 + extent):
            cyc = cyc[:-1]
        out.append(f'<polygon class="limit-cycle" points="{_points_attr(cyc, tf)}"/>')
    out.append(f'<circle class="origin" cx="{_fmt(c)}" cy="{_fmt(c)}" r="3"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_svg(source, out_path=None, trajectories=()):
    """Render an :class:`AnalysisReport` or a list of trajectories.

    A report contributes its cycle and, when a trapping disk exists, its
    radius. The SVG text is returned and also written to ``out_path``.
    """
    if isinstance(source, AnalysisReport):
        cyc = source.cycle.samples if source.cycle is not None else None
        sigma = source.trapping.sigma if source.trapping.exists else None
        text = render_svg(list(trajectories), cyc, sigma, title=f"phi = {source.phi_source}")
    else:
        text = render_svg(list(source) + list(trajectories))
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
