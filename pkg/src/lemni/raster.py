"""Rasterized lemniscates: occupancy grids, distance transforms, inradius, components.

Occupancy is defined cell by cell as ``field(cell center) < 0``. To avoid
evaluating every cell, :func:`rasterize_field` walks a quadtree of cell
blocks and fills a whole block at once when a rigorous bound shows that the
field cannot change sign over the block's cell centers; undecided blocks are
split down to single cells. The result is identical to evaluating every
cell center.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .polynomial import as_zeros

MAX_CELLS = 10**8
SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Box:
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    @classmethod
    def square(cls, radius: float, center: complex = 0j) -> "Box":
        c = complex(center)
        return cls(c.real - radius, c.real + radius, c.imag - radius, c.imag + radius)

    def as_tuple(self):
        return (self.xmin, self.xmax, self.ymin, self.ymax)


def _as_box(box) -> Box:
    return box if isinstance(box, Box) else Box(*map(float, box))


def grid_shape(box, h: float) -> tuple[int, int]:
    """(ny, nx) for a box and cell size; both sides must be whole multiples of h."""
    box = _as_box(box)
    if not h > 0:
        raise ValueError("cell size h must be positive")
    if not (box.xmax > box.xmin and box.ymax > box.ymin):
        raise ValueError("degenerate box")
    out = []
    for span in (box.ymax - box.ymin, box.xmax - box.xmin):
        q = span / h
        k = round(q)
        if abs(q - k) > 1e-6 * max(1.0, q):
            raise ValueError(f"box side {span} is not a multiple of h={h}")
        if k < 8:
            raise ValueError("a raster needs at least 8 cells per side")
        out.append(int(k))
    if out[0] * out[1] > MAX_CELLS:
        raise MemoryError(f"raster of {out[1]}x{out[0]} cells exceeds the {MAX_CELLS} cell guard")
    return out[0], out[1]


def default_box(zeros=None, measure=None, h: float = 0.01, pad: float = 1.0) -> Box:
    """Centered square enclosing every zero (and the support) with margin ``pad``.

    With pad = 1, |p_n| >= 1 outside the box since every factor has modulus >= 1.
    """
    R = 0.0
    if measure is not None:
        R = measure.support_radius()
    if zeros is not None:
        R = max(R, float(np.max(np.abs(as_zeros(zeros)))))
    R += pad
    q = 2 * R / h
    k = round(q) if abs(q - round(q)) < 1e-9 * q else math.ceil(q)
    return Box.square(k * h / 2)


@dataclass(frozen=True, eq=False)
class Raster:
    box: Box
    h: float
    occupancy: np.ndarray  # bool, shape (ny, nx); row iy, column ix

    @property
    def shape(self):
        return self.occupancy.shape

    def cell_x(self) -> np.ndarray:
        return self.box.xmin + (np.arange(self.shape[1]) + 0.5) * self.h

    def cell_y(self) -> np.ndarray:
        return self.box.ymin + (np.arange(self.shape[0]) + 0.5) * self.h

    def cell_centers(self) -> np.ndarray:
        return self.cell_x()[None, :] + 1j * self.cell_y()[:, None]

    def cell_of(self, z):
        """(iy, ix) index arrays of the cells containing the points ``z``; -1 if outside."""
        z = np.asarray(z, dtype=complex)
        ix = np.floor((z.real - self.box.xmin) / self.h).astype(int)
        iy = np.floor((z.imag - self.box.ymin) / self.h).astype(int)
        ny, nx = self.shape
        bad = (ix < 0) | (ix >= nx) | (iy < 0) | (iy >= ny)
        ix[bad] = -1
        iy[bad] = -1
        return iy, ix


class PolynomialField:
    """log|p_n| with a rigorous block bound.

    On a disk |z - c| <= r free of zeros, a second-order Taylor expansion of
    log p gives |f(z) - f(c)| <= |F(c)| r + r^2/2 * sum_k 1/(d_k - r)^2 where
    F = p'/p and d_k = |c - X_k|.
    """

    def __init__(self, zeros):
        self.X = as_zeros(zeros)
        self.tol = 1e-9 * max(1, self.X.size)

    def values(self, pts: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(pts[:, None] - self.X[None, :])).sum(axis=1)

    def value_and_bound(self, c: np.ndarray, r: np.ndarray):
        diff = c[:, None] - self.X[None, :]
        d = np.abs(diff)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.log(d).sum(axis=1)
            F = np.abs((1.0 / diff).sum(axis=1))
            gap = d - r[:, None]
            curv = (1.0 / (gap * gap)).sum(axis=1)
            bound = F * r + 0.5 * r * r * curv
        bound[np.any(gap <= 0, axis=1)] = np.inf
        return val, bound


def _chunks(n_items: int, width: int, budget: int = 1 << 21):
    step = max(1, budget // max(1, width))
    for s in range(0, n_items, step):
        yield slice(s, min(n_items, s + step))


def rasterize_field(field, box, h: float, mask_radius: float | None = None) -> Raster:
    """Occupancy {field < 0} at cell centers, via a sign-certified quadtree.

    ``field`` provides ``value_and_bound(centers, radii)`` returning the value
    at each center and a bound on |field(z) - field(center)| for |z - center|
    <= radius, plus a ``tol`` for floating error. Cells whose centers lie at
    or beyond ``mask_radius`` from the origin are left unoccupied.
    """
    box = _as_box(box)
    ny, nx = grid_shape(box, h)
    occ = np.zeros((ny, nx), dtype=bool)
    B = 1
    while B < 64 and B < max(nx, ny):
        B *= 2
    jj, ii = np.meshgrid(np.arange(0, ny, B), np.arange(0, nx, B), indexing="ij")
    i0 = ii.ravel()
    j0 = jj.ravel()
    width = getattr(field, "X", np.empty(1)).size
    size = B
    while i0.size:
        i1 = np.minimum(i0 + size, nx)
        j1 = np.minimum(j0 + size, ny)
        xlo = box.xmin + (i0 + 0.5) * h
        xhi = box.xmin + (i1 - 0.5) * h
        ylo = box.ymin + (j0 + 0.5) * h
        yhi = box.ymin + (j1 - 0.5) * h
        c = 0.5 * (xlo + xhi) + 0.5j * (ylo + yhi)
        r = 0.5 * np.hypot(xhi - xlo, yhi - ylo)
        decided = np.zeros(i0.size, dtype=bool)
        fill = np.zeros(i0.size, dtype=bool)
        todo = np.ones(i0.size, dtype=bool)
        if mask_radius is not None:
            ac = np.abs(c)
            outside = ac - r >= mask_radius
            decided |= outside
            todo &= ~outside
            straddle = (ac + r >= mask_radius) & ~outside
            # single straddling cells are decided by the center test alone
            single = r == 0
            todo &= ~(straddle & ~single)
        idx = np.flatnonzero(todo)
        if idx.size:
            val = np.empty(idx.size)
            bnd = np.empty(idx.size)
            for sl in _chunks(idx.size, width):
                v, b = field.value_and_bound(c[idx[sl]], r[idx[sl]])
                val[sl] = v
                bnd[sl] = b
            single = r[idx] == 0
            sure = single | (np.abs(val) > bnd + field.tol)
            decided[idx[sure]] = True
            fill[idx[sure]] = val[sure] < 0
        for k in np.flatnonzero(decided & fill):
            occ[j0[k]:j1[k], i0[k]:i1[k]] = True
        rest = ~decided
        if not np.any(rest) or size == 1:
            break
        half = size // 2
        pi, pj = i0[rest], j0[rest]
        pi1, pj1 = i1[rest], j1[rest]
        kids_i, kids_j = [], []
        for di in (0, half):
            for dj in (0, half):
                ci, cj = pi + di, pj + dj
                ok = (ci < pi1) & (cj < pj1)
                kids_i.append(ci[ok])
                kids_j.append(cj[ok])
        i0 = np.concatenate(kids_i)
        j0 = np.concatenate(kids_j)
        size = half
    return Raster(box, float(h), occ)


def rasterize(zeros, box, h: float) -> Raster:
    """Occupancy grid of the lemniscate: cell occupied iff log|p_n|(center) < 0."""
    return rasterize_field(PolynomialField(zeros), box, h)


def rasterize_brute(zeros, box, h: float) -> Raster:
    """Reference rasterization evaluating every cell center directly."""
    box = _as_box(box)
    grid_shape(box, h)
    proto = Raster(box, float(h), np.zeros(grid_shape(box, h), bool))
    pts = proto.cell_centers()
    field = PolynomialField(zeros)
    flat = pts.ravel()
    vals = np.empty(flat.size)
    for sl in _chunks(flat.size, field.X.size):
        vals[sl] = field.values(flat[sl])
    return Raster(box, float(h), (vals < 0).reshape(pts.shape))


def _boundary_distance(raster: Raster) -> np.ndarray:
    x = raster.cell_x()
    y = raster.cell_y()
    b = raster.box
    dx = np.minimum(x - b.xmin, b.xmax - x)
    dy = np.minimum(y - b.ymin, b.ymax - y)
    return np.minimum(dx[None, :], dy[:, None])


def distance_transform(raster: Raster) -> np.ndarray:
    """Exact Euclidean distance from each occupied cell center to the nearest
    unoccupied cell center or the box boundary; 0 on unoccupied cells."""
    occ = raster.occupancy
    if not occ.any():
        return np.zeros(occ.shape)
    if occ.all():
        edt = np.full(occ.shape, np.inf)
    else:
        edt = ndimage.distance_transform_edt(occ) * raster.h
    out = np.minimum(edt, _boundary_distance(raster))
    out[~occ] = 0.0
    return out


@dataclass(frozen=True)
class InradiusEstimate:
    rho_hat: float
    center: complex
    half_cell_error: float
    grid_points_inside: int


def inradius_estimate(raster: Raster, dist: np.ndarray | None = None) -> InradiusEstimate:
    """Largest distance-transform value; ties go to the lexicographically smallest (x, y)."""
    err = raster.h * SQRT2
    inside = int(raster.occupancy.sum())
    if inside == 0:
        return InradiusEstimate(0.0, complex(math.nan, math.nan), err, 0)
    if dist is None:
        dist = distance_transform(raster)
    m = dist.max()
    iy, ix = np.nonzero(dist == m)
    k = np.lexsort((iy, ix))[0]
    x = raster.box.xmin + (ix[k] + 0.5) * raster.h
    y = raster.box.ymin + (iy[k] + 0.5) * raster.h
    return InradiusEstimate(float(m), complex(x, y), err, inside)


@dataclass(frozen=True)
class ComponentSummary:
    label: int
    cell_count: int
    diameter: float
    contains_zero_indices: list


def _hull(points: np.ndarray) -> np.ndarray:
    """Convex hull vertices of integer points (monotone chain); collinear input allowed."""
    pts = np.unique(points, axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(tuple(p))
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(tuple(p))
    return np.array(lower[:-1] + upper[:-1])


def _max_extent(iy: np.ndarray, ix: np.ndarray) -> float:
    # hull candidates: extreme rows in every occupied column
    order = np.lexsort((iy, ix))
    ix, iy = ix[order], iy[order]
    first = np.r_[True, ix[1:] != ix[:-1]]
    last = np.r_[ix[1:] != ix[:-1], True]
    cand = np.concatenate([np.stack([ix[first], iy[first]], 1), np.stack([ix[last], iy[last]], 1)])
    hull = _hull(cand).astype(float)
    if len(hull) < 2:
        return 0.0
    d = hull[:, None, :] - hull[None, :, :]
    return float(np.sqrt((d * d).sum(-1).max()))


def label_components(raster: Raster):
    """8-connected labels (0 = unoccupied) and the number of components."""
    return ndimage.label(raster.occupancy, structure=np.ones((3, 3), dtype=int))


def connected_components(raster: Raster, zeros=None) -> list[ComponentSummary]:
    """8-connected components with a diameter upper bound and the zeros they hold.

    Diameter is the largest distance between two cell centers of the
    component plus h*sqrt(2), an upper bound for the union of its cells.
    """
    labels, count = label_components(raster)
    owners: dict[int, list] = {k: [] for k in range(1, count + 1)}
    if zeros is not None:
        X = as_zeros(zeros)
        ziy, zix = raster.cell_of(X)
        for k, (a, b) in enumerate(zip(ziy, zix)):
            if a >= 0 and labels[a, b] > 0:
                owners[int(labels[a, b])].append(k)
    out = []
    for lab, sl in enumerate(ndimage.find_objects(labels), start=1):
        sub = labels[sl] == lab
        iy, ix = np.nonzero(sub)
        ext = _max_extent(iy + sl[0].start, ix + sl[1].start)
        out.append(ComponentSummary(lab, int(sub.sum()), ext * raster.h + raster.h * SQRT2,
                                    owners[lab]))
    return out


def unresolved_zero_cells(raster: Raster, zeros) -> int:
    """Number of distinct cells that hold a zero but have no occupied cell around them.

    Every zero lies in the lemniscate; such zeros sit in specks below the
    grid resolution and each of these cells marks at least one component the
    raster cannot see.
    """
    X = as_zeros(zeros)
    iy, ix = raster.cell_of(X)
    occ = np.pad(raster.occupancy, 1)
    cells = set()
    for a, b in zip(iy, ix):
        if a < 0:
            continue
        if not occ[a:a + 3, b:b + 3].any():
            cells.add((int(a), int(b)))
    return len(cells)


def component_count(raster: Raster, zeros) -> int:
    """Components seen by the raster plus sub-resolution specks around zeros."""
    _, count = label_components(raster)
    return int(count) + unresolved_zero_cells(raster, zeros)


def raster_contains_disk(raster: Raster, center: complex, radius: float) -> bool:
    """True when every cell center in the closed disk is occupied."""
    pts = raster.cell_centers()
    inside = np.abs(pts - complex(center)) <= radius
    return bool(raster.occupancy[inside].all())


def write_pgm(raster: Raster, path) -> None:
    """Binary PGM (P5, maxval 255), occupied = 255, top row = largest y."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img = np.where(raster.occupancy[::-1], 255, 0).astype(np.uint8)
    ny, nx = img.shape
    path.write_bytes(f"P5\n{nx} {ny}\n255\n".encode() + img.tobytes())


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    assert parts[0] == b"P5"
    nx, ny, _ = int(parts[1]), int(parts[2]), int(parts[3])
    img = np.frombuffer(parts[4][-nx * ny:], dtype=np.uint8).reshape(ny, nx)
    return img[::-1] == 255


def write_grid_csv(grid: np.ndarray, path, fmt: str = "%.10g") -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, grid, delimiter=",", fmt=fmt)
