"""Independent reference implementations used to derive and check expected values.

Nothing here imports the package's algorithms; paths are handled as plain
vertex lists and every quantity is recomputed from first principles.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np
from scipy import integrate, optimize


# --------------------------------------------------------------------------
# paths as vertex lists


def vertices_of(start_y: int, edges) -> list[tuple[int, int]]:
    """Vertices from ``(q, p, m)`` triples."""
    pts = [(0, start_y)]
    for q, p, m in edges:
        x, y = pts[-1]
        pts.append((x + m * q, y + m * p))
    return pts


def _side(a, b, pt) -> int:
    """Sign of the cross product: +1 if ``pt`` is above segment ``ab``, 0 on its line."""
    c = (b[0] - a[0]) * (pt[1] - a[1]) - (b[1] - a[1]) * (pt[0] - a[0])
    return (c > 0) - (c < 0)


def _relation(verts, pt) -> int:
    """+1 above the path, 0 on it, -1 below (``pt.x`` inside the path's range)."""
    for a, b in zip(verts, verts[1:]):
        if a[0] <= pt[0] <= b[0]:
            return _side(a, b, pt)
    raise ValueError("point outside path range")


def j_oracle(verts) -> tuple[int, int]:
    """``(j_plus, j_minus)`` by testing every lattice point of the bounding box.

    ``R_+`` is the closed region between the axis and the part of the path
    above it (points on the path excluded); ``R_-`` the closed region between
    the axis and the part below it (points on the axis excluded).
    """
    d = verts[-1][0]
    ys = [v[1] for v in verts]
    jp = jm = 0
    for x in range(d + 1):
        for y in range(min(ys + [0]) - 1, max(ys + [0]) + 2):
            rel = _relation(verts, (x, y))
            if y >= 0 and rel < 0:  # strictly below the path, on or above the axis
                jp += 1
            if y < 0 and rel >= 0:  # on or above the path, strictly below the axis
                jm += 1
    return jp, jm


def index_oracle(verts, h: int) -> int:
    jp, jm = j_oracle(verts)
    return 2 * (jp - jm) - verts[-1][0] + h


def quadratic_action_oracle(verts) -> Fraction:
    """Action for ``h = (z+1)^2/2``: each edge ``(dx, dy)`` contributes ``dy - dy^2/(4 dx)``."""
    total = Fraction(verts[0][1])
    for a, b in zip(verts, verts[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        total += dy - Fraction(dy * dy, 4 * dx)
    return total


def convex_paths(d: int, top: int):
    """All convex lattice paths from ``(0, 0)`` of width ``d`` with slopes in ``[0, top]``.

    Generated vertex by vertex (no primitive-vector bookkeeping); an edge is
    any lattice vector, and consecutive edges must have strictly larger slope.
    """
    out = []

    def rec(pts, last_slope):
        x, y = pts[-1]
        if x == d:
            out.append(tuple(pts))
            return
        for nx in range(x + 1, d + 1):
            dx = nx - x
            for dy in range(0, top * dx + 1):
                s = Fraction(dy, dx)
                if last_slope is not None and s <= last_slope:
                    continue
                pts.append((nx, y + dy))
                rec(pts, s)
                pts.pop()

    rec([(0, 0)], None)
    return out


def shift(verts, y):
    return [(a, b + y) for a, b in verts]


def c_dk_oracle_quadratic(d: int, k: int):
    """``max A`` over all unlabeled convex paths with ``2j - d = k`` for ``h = (z+1)^2/2``.

    The start height is scanned over a range that covers every grading
    between ``-3(2d+2)`` and ``3(2d+2)`` around the shape's own grading.
    """
    best = None
    for shape in convex_paths(d, 2):
        for y in range(-abs(k) - 2 * d - 4, abs(k) + 2 * d + 5):
            verts = shift(shape, y)
            if index_oracle(verts, 0) == k:
                a = quadratic_action_oracle(verts)
                best = a if best is None or a > best else best
    return best


# --------------------------------------------------------------------------
# corner rounding by a global hull


def global_rounding(verts, corner: int):
    """Vertices of the lower hull of ``{(x, y) : y >= P(x)}`` with the corner point removed.

    The column minimum is ``ceil(P(x))`` everywhere except at the corner,
    where it is one higher.
    """
    d = verts[-1][0]
    cx, cy = verts[corner]
    cols = []
    for x in range(d + 1):
        for a, b in zip(verts, verts[1:]):
            if a[0] <= x <= b[0]:
                num = a[1] * (b[0] - a[0]) + (b[1] - a[1]) * (x - a[0])
                den = b[0] - a[0]
                y = -((-num) // den)
                break
        cols.append((x, cy + 1 if x == cx else y))
    hull = []
    for pt in cols:
        while len(hull) >= 2 and _side(hull[-2], hull[-1], pt) <= 0:
            hull.pop()
        hull.append(pt)
    return hull


def primitive_edges(verts):
    """``(q, p, m)`` triples of a vertex list, merging collinear edges."""
    out = []
    for a, b in zip(verts, verts[1:]):
        dx, dy = b[0] - a[0], b[1] - a[1]
        g = gcd(dx, dy)
        q, p = dx // g, dy // g
        if out and (out[-1][0], out[-1][1]) == (q, p):
            out[-1] = (q, p, out[-1][2] + g)
        else:
            out.append((q, p, g))
    return out


# --------------------------------------------------------------------------
# GF(2) linear algebra on dense 0/1 lists


def gf2_rank_dense(rows: list[list[int]]) -> int:
    m = [r[:] for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][c]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c]:
                m[i] = [x ^ y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def columns_to_rows(columns: list[list[int]], nrows: int) -> list[list[int]]:
    return [[col[r] for col in columns] for r in range(nrows)]


def homology_rank_oracle(dk_cols, dk1_cols, n_rows_k_minus_1, n_k) -> int:
    """``dim ker d_k - rank d_{k+1}`` from dense column lists."""
    rank_k = gf2_rank_dense(columns_to_rows(dk_cols, n_rows_k_minus_1)) if dk_cols and n_rows_k_minus_1 else 0
    rank_k1 = gf2_rank_dense(columns_to_rows(dk1_cols, n_k)) if dk1_cols and n_k else 0
    return n_k - rank_k - rank_k1


def gf2_nullspace(columns: list[list[int]], nrows: int) -> list[list[int]]:
    """Basis of ``{c : sum c_i columns[i] = 0}`` (vectors indexed like ``columns``)."""
    n = len(columns)
    if n == 0:
        return []
    if nrows == 0:
        return [[int(i == j) for i in range(n)] for j in range(n)]
    m = columns_to_rows(columns, nrows)
    pivots, rank = [], 0
    for c in range(n):
        pivot = next((i for i in range(rank, nrows) if m[i][c]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for i in range(nrows):
            if i != rank and m[i][c]:
                m[i] = [x ^ y for x, y in zip(m[i], m[rank])]
        pivots.append(c)
        rank += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * n
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = m[r][f]
        basis.append(v)
    return basis


def min_max_oracle(actions, dk_cols, n_rows_below, dk1_cols):
    """Smallest ``L`` such that a cycle supported on actions ``<= L`` is not a boundary."""
    n = len(actions)
    boundaries = [list(col) for col in dk1_cols]
    base_rank = gf2_rank_dense(columns_to_rows(boundaries, n)) if boundaries else 0
    for level in sorted(set(actions)):
        keep = [i for i in range(n) if actions[i] <= level]
        sub = [dk_cols[i] for i in keep]
        for z in gf2_nullspace(sub, n_rows_below):
            full = [0] * n
            for i, bit in zip(keep, z):
                full[i] = bit
            stacked = boundaries + [full]
            if gf2_rank_dense(columns_to_rows(stacked, n)) > base_rank:
                return level
    return None


# --------------------------------------------------------------------------
# dual norm and quadrature


def dual_norm_oracle(v, h, top, samples: int = 20001) -> float:
    """Support function of ``{-1 <= x <= 1, h(x) <= y <= top}`` by dense sampling and refinement."""
    vx, vy = float(v[0]), float(v[1])
    corners = [(-1.0, 0.0), (-1.0, top), (1.0, top), (1.0, h(1.0))]
    best = max(vx * a + vy * b for a, b in corners)
    xs = np.linspace(-1.0, 1.0, samples)
    vals = vx * xs + vy * np.array([h(x) for x in xs])
    i = int(np.argmax(vals))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, samples - 1)]
    res = optimize.minimize_scalar(lambda x: -(vx * x + vy * h(x)), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-13})
    return max(best, float(vals[i]), -res.fun)


def integral_oracle(h, a=-1.0, b=1.0) -> float:
    value, _ = integrate.quad(h, a, b, epsabs=0.0, epsrel=1e-12)
    return value
