"""Combinatorial grading ``I(P) = 2 j(P) - d + h`` of labeled lattice paths."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math
from math import gcd

from .lattice_path import LatticePath


@dataclass(frozen=True)
class IndexReport:
    j_plus: int
    j_minus: int
    j: int
    h_count: int
    degree: int
    index: int

    def __str__(self):
        return (f"j+={self.j_plus} j-={self.j_minus} j={self.j} d={self.degree} "
                f"h={self.h_count} I={self.index}")


def count_j(path: LatticePath) -> tuple[int, int, int]:
    """Return ``(j_plus, j_minus, j)``.

    Column ``x`` contributes ``ceil(P(x))`` points to ``R_+`` when positive
    (points on ``P`` excluded) and ``-ceil(P(x))`` points to ``R_-`` when
    negative (points on the x-axis excluded, even if they also lie on ``P``).
    """
    j_plus = j_minus = 0
    for c in path.column_ceilings():
        if c > 0:
            j_plus += c
        elif c < 0:
            j_minus -= c
    return j_plus, j_minus, j_plus - j_minus


def j_value(path: LatticePath) -> int:
    return sum(path.column_ceilings())


def index(path: LatticePath) -> int:
    return 2 * j_value(path) - path.degree + path.h_count


def index_report(path: LatticePath) -> IndexReport:
    jp, jm, j = count_j(path)
    d, h = path.degree, path.h_count
    return IndexReport(jp, jm, j, h, d, 2 * j - d + h)


# --------------------------------------------------------------------------
# Pick's theorem cross-check


@dataclass(frozen=True)
class PickResult:
    status: str  # "ok", "mismatch", "degenerate" or "crossing"
    twice_area: Fraction | None = None
    pick_rhs: int | None = None
    lattice_points: int | None = None
    boundary_formula: int | None = None
    j_from_points: int | None = None
    j: int | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"


class PickMismatch(AssertionError):
    pass


def _region_polygon(path: LatticePath) -> list[tuple[int, int]]:
    """Closed region between the path and the x-axis (path assumed not to cross the axis)."""
    verts = path.vertices()
    d = path.degree
    return [(0, 0)] + verts + [(d, 0)]


def _shoelace2(poly: list[tuple[int, int]]) -> int:
    s = 0
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return abs(s)


def _closed_region_points(path: LatticePath) -> int:
    """Lattice points in the closed region between the path and the x-axis, by columns."""
    total = 0
    for x in range(path.degree + 1):
        height = path.height(x)
        if height >= 0:
            total += math.floor(height) + 1
        else:
            total += 1 - math.ceil(height)
    return total


def pick_check(path: LatticePath, *, raise_on_mismatch: bool = False) -> PickResult:
    """Verify Pick's theorem for the region ``R`` between ``P`` and the x-axis.

    With ``M`` the total multiplicity and ``V`` the rise, the boundary of ``R``
    carries ``M + d + |y| + |w|`` lattice points, so Pick gives
    ``2 Area(R) = 2T - (M + d + |y| + |w|) - 2``; at ``y = 0`` this is the
    ``M + d + (w - y)`` form.  It also checks ``j = T - M - 1`` (path above the
    axis) or ``j = -(T - d - 1)`` (path below it).
    """
    y, w, d = path.start_y, path.end_y, path.degree
    if y < 0 < w:
        return PickResult("crossing")
    poly = _region_polygon(path)
    twice_area = _shoelace2(poly)
    if twice_area == 0:
        return PickResult("degenerate", twice_area=Fraction(0))
    T = _closed_region_points(path)
    M = path.total_multiplicity
    boundary = M + d + abs(y) + abs(w)
    # independent boundary count from edge gcds
    bpoly_count = 0
    for i in range(len(poly)):
        (x1, y1), (x2, y2) = poly[i], poly[(i + 1) % len(poly)]
        bpoly_count += gcd(abs(x2 - x1), abs(y2 - y1))
    rhs = 2 * T - boundary - 2
    j = j_value(path)
    j_pts = T - M - 1 if y >= 0 else -(T - d - 1)
    ok = twice_area == rhs and bpoly_count == boundary and j_pts == j
    result = PickResult("ok" if ok else "mismatch", Fraction(twice_area), rhs, T, boundary, j_pts, j)
    if not ok and raise_on_mismatch:
        raise PickMismatch(f"Pick check failed for {path}: 2A={twice_area}, rhs={rhs}, "
                           f"boundary={boundary} vs {bpoly_count}, j={j} vs {j_pts}")
    return result
