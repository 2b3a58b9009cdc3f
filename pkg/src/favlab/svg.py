"""Minimal deterministic SVG output: cylinder point clouds and, optionally,
per-angle projection interval bars."""

from __future__ import annotations

import math

from .errors import LevelTooLarge
from .favard import _LevelSweeper, merge_intervals


def _fmt(v):
    return f"{v:.6f}"


def render_svg(ifs, depth, theta=None, size=640, cap=200_000):
    """Point cloud of level-depth cylinder centers sized by r_u * R0.

    Output bytes are a pure function of the arguments.
    """
    if ifs.m**depth > cap:
        raise LevelTooLarge(f"{ifs.m}^{depth} glyphs exceed cap {cap}")
    sweeper = _LevelSweeper(ifs, cap=cap)
    sweeper.advance_to(depth)
    centers = sweeper._centers
    radii = sweeper._ratios * ifs.R0
    cx, cy = ifs.center
    r0 = max(ifs.R0, 1e-9)
    margin = 1.1
    scale = size / (2.0 * r0 * margin)

    def sx(x):
        return (x - cx) * scale + size / 2.0

    def sy(y):
        return size / 2.0 - (y - cy) * scale

    bar_h = 40 if theta is not None else 0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size + bar_h}" viewBox="0 0 {size} {size + bar_h}">',
        f'<rect width="{size}" height="{size + bar_h}" fill="white"/>',
    ]
    for (x, y), r in zip(centers.tolist(), radii.tolist()):
        rr = max(r * scale, 0.3)
        lines.append(
            f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="{_fmt(rr)}" '
            'fill="steelblue" fill-opacity="0.6"/>'
        )
    if theta is not None:
        lo, hi = sweeper.intervals_at(theta)
        merged = merge_intervals(lo, hi)
        y0 = size + 10
        for a, b in merged.intervals:
            x0 = (a - (cx * math.cos(theta) + cy * math.sin(theta))) * scale + size / 2.0
            w = (b - a) * scale
            lines.append(
                f'<rect x="{_fmt(x0)}" y="{y0}" width="{_fmt(max(w, 0.2))}" '
                'height="20" fill="darkorange"/>'
            )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
