"""Minimal SVG polyline projections of a trajectory (x-y and x-z panes)."""
from __future__ import annotations

from typing import Sequence

import numpy as np

PANE = 320
MARGIN = 24


def _polyline(u, v, bounds, x_off: float, dashed: bool) -> str:
    umin, vmin, span = bounds
    inner = PANE - 2 * MARGIN
    px = x_off + MARGIN + (u - umin) / span * inner
    py = 20 + PANE - MARGIN - (v - vmin) / span * inner
    pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))
    dash = ' stroke-dasharray="4 3"' if dashed else ""
    return f'<polyline fill="none" stroke="black" stroke-width="1"{dash} points="{pts}"/>'


def _bounds(trajs, i: int, j: int):
    u = np.concatenate([t[:, i] for t in trajs])
    v = np.concatenate([t[:, j] for t in trajs])
    span = max(float(u.max() - u.min()), float(v.max() - v.min()), 1e-12)
    return float(u.min()), float(v.min()), span


def trajectory_svg(states: np.ndarray, title: str = "", overlays: Sequence[np.ndarray] = ()) -> str:
    """Two panes sharing one scale per pane; trajectories in ``overlays`` are dashed."""
    trajs = [np.asarray(t, dtype=float) for t in (states, *overlays)]
    width, height = 2 * PANE, PANE + 40
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<text x="{MARGIN}" y="14" font-size="12">{title}</text>',
        f'<text x="{MARGIN}" y="{height - 6}" font-size="11">x-y</text>',
        f'<text x="{PANE + MARGIN}" y="{height - 6}" font-size="11">x-z</text>',
    ]
    xy = _bounds(trajs, 0, 1)
    xz = _bounds(trajs, 0, 2)
    for k, t in enumerate(trajs):
        parts.append(_polyline(t[:, 0], t[:, 1], xy, 0, k > 0))
        parts.append(_polyline(t[:, 0], t[:, 2], xz, PANE, k > 0))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
