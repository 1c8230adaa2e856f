"""Marching-squares contours of log|p_n| = 0 and deterministic SVG figures."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measures import negative_set_inradius
from .polynomial import as_zeros, log_modulus
from .raster import Raster, _as_box, component_count, default_box, rasterize

# corner order: 0 = (j, i), 1 = (j, i+1), 2 = (j+1, i+1), 3 = (j+1, i)
# edges: 0 bottom (0-1), 1 right (1-2), 2 top (3-2), 3 left (0-3)
_CASES = {
    0: (), 15: (),
    1: ((3, 0),), 14: ((3, 0),),
    2: ((0, 1),), 13: ((0, 1),),
    4: ((1, 2),), 11: ((1, 2),),
    8: ((2, 3),), 7: ((2, 3),),
    3: ((3, 1),), 12: ((3, 1),),
    6: ((0, 2),), 9: ((0, 2),),
}


@dataclass(frozen=True)
class Overlay:
    center: complex
    radius: float
    style: str = "dashed"


def _grid_values(zeros, raster: Raster) -> np.ndarray:
    """log|p_n| at cell centers next to a sign change; +-1 placeholders elsewhere.

    Only the sign matters away from the curve, so the exact value is computed
    where an interpolation will actually read it.
    """
    occ = raster.occupancy
    vals = np.where(occ, -1.0, 1.0)
    edge = np.zeros_like(occ)
    dx = occ[:, 1:] != occ[:, :-1]
    dy = occ[1:, :] != occ[:-1, :]
    edge[:, 1:] |= dx
    edge[:, :-1] |= dx
    edge[1:, :] |= dy
    edge[:-1, :] |= dy
    jj, ii = np.nonzero(edge)
    if jj.size:
        pts = raster.cell_x()[ii] + 1j * raster.cell_y()[jj]
        v = log_modulus(zeros, pts)
        # keep the sign decided by the raster even where floating noise disagrees
        v = np.where(occ[jj, ii], np.clip(v, -1e3, -1e-300), np.maximum(v, 0.0))
        vals[jj, ii] = v
    return vals


def _segments(zeros, raster: Raster, vals: np.ndarray):
    """Yield pairs of edge keys; an edge key identifies a grid edge uniquely."""
    neg = vals < 0
    ny, nx = neg.shape
    code = (neg[:-1, :-1].astype(int) | (neg[:-1, 1:] << 1) | (neg[1:, 1:] << 2)
            | (neg[1:, :-1] << 3))
    jj, ii = np.nonzero((code != 0) & (code != 15))
    h = raster.h
    cx, cy = raster.cell_x(), raster.cell_y()
    for j, i in zip(jj.tolist(), ii.tolist()):
        c = int(code[j, i])
        keys = {0: ("h", j, i), 1: ("v", j, i + 1), 2: ("h", j + 1, i), 3: ("v", j, i)}
        if c in (5, 10):
            center = complex(cx[i] + h / 2, cy[j] + h / 2)
            mid_neg = log_modulus(zeros, center) < 0
            # corners 0 and 2 share a sign in case 5; join them through the middle if it agrees
            if (c == 5) == mid_neg:
                pairs = ((3, 2), (0, 1))
            else:
                pairs = ((3, 0), (1, 2))
        else:
            pairs = _CASES[c]
        for a, b in pairs:
            yield keys[a], keys[b]


def _edge_point(cx, cy, h, vals: np.ndarray, key) -> tuple[float, float]:
    kind, j, i = key
    if kind == "h":
        a, b = vals[j, i], vals[j, i + 1]
        return float(cx[i] + a / (a - b) * h), float(cy[j])
    a, b = vals[j, i], vals[j + 1, i]
    return float(cx[i]), float(cy[j] + a / (a - b) * h)


def contour_paths(zeros, raster: Raster) -> list[tuple[list[tuple[float, float]], bool]]:
    """Chains of the zero level set as (points, closed) pairs, in a fixed order."""
    vals = _grid_values(zeros, raster)
    adj: dict = {}
    for a, b in _segments(zeros, raster, vals):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    cx, cy = raster.cell_x(), raster.cell_y()
    seen = set()
    paths = []
    # start open chains at their loose ends first
    starts = sorted(k for k, v in adj.items() if len(v) == 1) + sorted(adj)
    for s in starts:
        if s in seen:
            continue
        chain = [s]
        seen.add(s)
        cur = s
        while True:
            nxt = [k for k in adj[cur] if k not in seen]
            if not nxt:
                closed = len(chain) > 2 and s in adj[cur]
                break
            cur = nxt[0]
            chain.append(cur)
            seen.add(cur)
        paths.append(([_edge_point(cx, cy, raster.h, vals, k) for k in chain], closed))
    return paths


def _fmt(v: float) -> str:
    s = f"{v:.5f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def contour_svg(zeros, box, h: float, overlay_circles=(), raster: Raster | None = None,
                size_px: int = 600) -> str:
    """SVG 1.1 document: contour loops of |p_n| = 1, zeros as dots, dashed overlay circles.

    World coordinates are used directly with y negated, so the picture is
    upright. Overlays of radius 0 are dropped.
    """
    X = as_zeros(zeros)
    box = _as_box(box)
    if raster is None:
        raster = rasterize(X, box, h)
    w = box.xmax - box.xmin
    ht = box.ymax - box.ymin
    stroke = _fmt(w / 400)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size_px}" '
        f'height="{round(size_px * ht / w)}" '
        f'viewBox="{_fmt(box.xmin)} {_fmt(-box.ymax)} {_fmt(w)} {_fmt(ht)}">',
        f'<rect x="{_fmt(box.xmin)}" y="{_fmt(-box.ymax)}" width="{_fmt(w)}" height="{_fmt(ht)}" '
        'fill="white"/>',
    ]
    for pts, closed in contour_paths(X, raster):
        d = "M" + " L".join(f"{_fmt(x)} {_fmt(-y)}" for x, y in pts) + (" Z" if closed else "")
        out.append(f'<path class="contour" d="{d}" fill="#cfe3f5" stroke="#1f4e79" '
                   f'stroke-width="{stroke}"/>')
    for ov in overlay_circles:
        if not isinstance(ov, Overlay):
            ov = Overlay(*ov)
        if not ov.radius > 0:
            continue
        dash = "2,2" if ov.style == "dotted" else "6,4"
        out.append(f'<circle class="overlay {ov.style}" cx="{_fmt(ov.center.real)}" '
                   f'cy="{_fmt(-ov.center.imag)}" r="{_fmt(ov.radius)}" fill="none" '
                   f'stroke="#444444" stroke-width="{stroke}" '
                   f'stroke-dasharray="{_fmt(float(dash.split(",")[0]) * w / 400)},'
                   f'{_fmt(float(dash.split(",")[1]) * w / 400)}"/>')
    dot = _fmt(w / 200)
    for z in X:
        out.append(f'<circle class="zero" cx="{_fmt(z.real)}" cy="{_fmt(-z.imag)}" r="{dot}" '
                   'fill="#b22222"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class Figure:
    svg: str
    components: int
    rc: float


def figure(zeros, measure, h: float = 0.005) -> Figure:
    """Lemniscate figure with the unit circle and the r_c circle (dotted) overlaid."""
    X = as_zeros(zeros)
    box = default_box(X, measure, h)
    raster = rasterize(X, box, h)
    try:
        rc = negative_set_inradius(measure)
    except ValueError:
        rc = math.nan
    overlays = [Overlay(0j, 1.0, "dashed")]
    if math.isfinite(rc) and rc > 0 and rc != 1.0:
        overlays.append(Overlay(0j, rc, "dotted"))
    svg = contour_svg(X, box, h, overlays, raster=raster)
    return Figure(svg, component_count(raster, X), rc)
