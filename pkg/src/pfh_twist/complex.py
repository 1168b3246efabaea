"""The combinatorial PFH chain complex of a monotone twist.

Generators of degree ``d`` and grading ``k`` are labeled concave lattice
paths.  The differential counts corner roundings that locally lose one ``h``:
``<d alpha, beta> = 1`` iff ``P_alpha`` is a rounding of ``P_beta``.  Mod-2
linear algebra uses Python integers as bitsets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Iterable

from .action import action_leq, path_action
from .index import index
from .lattice_path import E, H, Edge, LatticePath
from .profile import TwistProfile


class GradingMismatch(RuntimeError):
    """A corner rounding produced a path outside the expected grading."""


class NoClass(ValueError):
    """The homology in the requested grading is not one-dimensional."""


# --------------------------------------------------------------------------
# Shapes and generators


def slope_set(d: int, top: int) -> list[Fraction]:
    """All slopes ``p/q`` in lowest terms with ``q <= d`` and ``0 <= p/q <= top``."""
    out = {Fraction(p, q) for q in range(1, d + 1) for p in range(0, top * q + 1) if gcd(p, q) == 1}
    return sorted(out)


@dataclass(frozen=True)
class Shape:
    """A path at start height 0 together with its grading and action there."""

    path: LatticePath
    index0: int
    action0: Fraction | float


def _edge_sequences(d: int, top: int, labeled: bool) -> Iterable[tuple[Edge, ...]]:
    slopes = slope_set(d, top)

    def rec(start: int, remaining: int, acc: list):
        if remaining == 0:
            yield tuple(acc)
            return
        for i in range(start, len(slopes)):
            s = slopes[i]
            q, p = s.denominator, s.numerator
            if q > remaining:
                continue
            labels = (E, H) if labeled and 0 < s < top else (E,)
            for m in range(1, remaining // q + 1):
                for label in labels:
                    acc.append(Edge(q, p, m, label))
                    yield from rec(i + 1, remaining - m * q, acc)
                    acc.pop()

    yield from rec(0, d, [])


@lru_cache(maxsize=64)
def enumerate_shapes(d: int, profile: TwistProfile, labeled: bool = True) -> tuple[Shape, ...]:
    """Every (labeled) concave path shape of degree ``d`` for ``profile``."""
    if d < 1:
        raise ValueError("degree must be positive")
    top = profile.slope_bound()
    shapes = []
    for edges in _edge_sequences(d, top, labeled):
        path = LatticePath(0, edges)
        shapes.append(Shape(path, index(path), path_action(path, profile).value))
    return tuple(shapes)


def _sort_key(path: LatticePath, value):
    return (-value, str(path))


@dataclass(frozen=True)
class GeneratorSet:
    degree: int
    grading: int
    generators: tuple[LatticePath, ...]
    actions: tuple

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    @property
    def lookup(self) -> dict[str, int]:
        cached = self.__dict__.get("_lookup")
        if cached is None:
            cached = {str(g): i for i, g in enumerate(self.generators)}
            object.__setattr__(self, "_lookup", cached)
        return cached


@lru_cache(maxsize=512)
def enumerate_generators(d: int, k: int, profile: TwistProfile, labeled: bool = True) -> GeneratorSet:
    """All generators of degree ``d`` and grading ``k``.

    Grading is affine in the start height with step ``2d + 2``, so each
    shape contributes at most one generator.  Ordered by decreasing action,
    then by serialization.
    """
    step = 2 * d + 2
    found = []
    for shape in enumerate_shapes(d, profile, labeled):
        diff = k - shape.index0
        if diff % step == 0:
            y = diff // step
            found.append((shape.path.shift(y), shape.action0 + y))
    found.sort(key=lambda item: _sort_key(*item))
    return GeneratorSet(d, k, tuple(p for p, _ in found), tuple(a for _, a in found))


def grading_window(d: int) -> range:
    """Default window of gradings: more than one full period ``2d + 2`` around ``[-d, d]``."""
    return range(-3 * d - 2, 3 * d + 3)


# --------------------------------------------------------------------------
# Corner rounding


def lower_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Lower convex hull of points sorted by x, dropping collinear interior points."""
    hull: list[tuple[int, int]] = []
    for pt in points:
        while len(hull) >= 2:
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            if (ax - ox) * (pt[1] - oy) - (ay - oy) * (pt[0] - ox) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def round_corner_shape(path: LatticePath, corner: int) -> tuple[LatticePath, int, int]:
    """Remove vertex ``corner`` and repair the lower hull of ``R_beta`` locally.

    Returns the new path with every edge of the changed stretch labeled ``E``,
    together with the half-open edge-index range ``[lo, hi)`` of that stretch
    in the new path (remnants of the two incident edges included).
    """
    edges = path.edges
    verts = path.vertices()
    n = len(edges)
    cx, cy = verts[corner]
    d = path.degree
    incoming = edges[corner - 1] if corner > 0 else None
    outgoing = edges[corner] if corner < n else None
    left = (cx - incoming.q, cy - incoming.p) if incoming else (0, cy + 1)
    right = (cx + outgoing.q, cy + outgoing.p) if outgoing else (d, cy + 1)

    column_min = []
    for x in range(left[0], right[0] + 1):
        if x == cx:
            y = cy + 1
        elif x < cx:
            y = left[1] + _ceil_div(incoming.p * (x - left[0]), incoming.q)
        else:
            y = cy + _ceil_div(outgoing.p * (x - cx), outgoing.q)
        column_min.append((x, y))
    hull = lower_hull(column_min)
    new_edges = [Edge.from_vector(b[0] - a[0], b[1] - a[1]) for a, b in zip(hull, hull[1:])]

    pre = list(edges[: corner - 1]) if incoming else []
    post = list(edges[corner + 1:]) if outgoing else []
    local = []
    if incoming and incoming.m > 1:
        local.append(Edge(incoming.q, incoming.p, incoming.m - 1, E))
    local.extend(new_edges)
    if outgoing and outgoing.m > 1:
        local.append(Edge(outgoing.q, outgoing.p, outgoing.m - 1, E))
    start_y = path.start_y if incoming else path.start_y + 1
    new_path = LatticePath(start_y, tuple(pre + local + post))
    return new_path, len(pre), len(pre) + len(local)


def roundings(path: LatticePath, top) -> list[tuple[LatticePath, tuple[int, int]]]:
    """All paths obtained by rounding a corner and locally losing one ``h``.

    For a corner with ``kappa > 0`` incident ``H`` edges, one output is
    produced per placement of ``kappa - 1`` ``H`` labels on the edges of the
    changed stretch (new hull edges plus remnants of the incident edges)
    whose slope lies in ``(0, top)``.  Double roundings are never produced.
    """
    out = []
    edges = path.edges
    verts = path.vertices()
    n = len(edges)
    for corner in range(n + 1):
        kappa = (corner > 0 and edges[corner - 1].label == H) + (corner < n and edges[corner].label == H)
        if kappa == 0:
            continue
        shape, lo, hi = round_corner_shape(path, corner)
        eligible = [i for i in range(lo, hi) if 0 < shape.edges[i].slope < top]
        for chosen in combinations(eligible, kappa - 1):
            new_edges = list(shape.edges)
            for i in chosen:
                new_edges[i] = new_edges[i].with_label(H)
            out.append((LatticePath(shape.start_y, tuple(new_edges)), verts[corner]))
    return out


# --------------------------------------------------------------------------
# Differential and homology


@dataclass(frozen=True)
class DifferentialMatrix:
    """``d_k : C_k -> C_{k-1}``; ``columns[a]`` is the bitset of rows hit by generator ``a``."""

    grading: int
    rows: GeneratorSet
    cols: GeneratorSet
    columns: tuple[int, ...]

    def entries(self) -> list[tuple[int, int]]:
        return [(r, c) for c, bits in enumerate(self.columns) for r in _bits(bits)]

    def dense(self) -> list[list[int]]:
        return [[(self.columns[c] >> r) & 1 for c in range(len(self.cols))] for r in range(len(self.rows))]


def _bits(x: int):
    i = 0
    while x:
        if x & 1:
            yield i
        x >>= 1
        i += 1


@lru_cache(maxsize=512)
def differential(d: int, k: int, profile: TwistProfile) -> DifferentialMatrix:
    rows = enumerate_generators(d, k - 1, profile)
    cols = enumerate_generators(d, k, profile)
    top = profile.slope_bound()
    columns = [0] * len(cols)
    lookup = cols.lookup
    for r, beta in enumerate(rows.generators):
        for alpha, corner in roundings(beta, top):
            c = lookup.get(str(alpha))
            if c is None:
                got = index(alpha)
                raise GradingMismatch(f"rounding {beta} at {corner} gave {alpha} with index {got}, expected {k}")
            if not action_leq(rows.actions[r], cols.actions[c]):
                raise GradingMismatch(f"rounding {beta} -> {alpha} decreased the action")
            columns[c] ^= 1 << r
    return DifferentialMatrix(k, rows, cols, tuple(columns))


def _reduce(vec: int, basis: dict[int, int]) -> int:
    while vec:
        b = basis.get(vec.bit_length() - 1)
        if b is None:
            return vec
        vec ^= b
    return 0


def gf2_rank(vectors: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for v in vectors:
        v = _reduce(v, basis)
        if v:
            basis[v.bit_length() - 1] = v
    return len(basis)


def d_squared_zero(d: int, k: int, profile: TwistProfile) -> bool:
    """Check ``d_{k-1} o d_k = 0`` over GF(2)."""
    upper = differential(d, k, profile)
    lower = differential(d, k - 1, profile)
    for col in upper.columns:
        acc = 0
        for r in _bits(col):
            acc ^= lower.columns[r]
        if acc:
            return False
    return True


def homology_rank(d: int, k: int, profile: TwistProfile) -> int:
    """``dim ker d_k - rank d_{k+1}``."""
    here = differential(d, k, profile)
    above = differential(d, k + 1, profile)
    return len(here.cols) - gf2_rank(here.columns) - gf2_rank(above.columns)


def all_elliptic_cycle(d: int, k: int, profile: TwistProfile) -> int:
    """Bitset of the sum of all-``E`` generators in grading ``k``."""
    gens = enumerate_generators(d, k, profile)
    return sum(1 << i for i, g in enumerate(gens.generators) if g.h_count == 0)


def boundary_of(chain: int, d: int, k: int, profile: TwistProfile) -> int:
    mat = differential(d, k, profile)
    acc = 0
    for c in _bits(chain):
        acc ^= mat.columns[c]
    return acc


def min_max(d: int, k: int, profile: TwistProfile):
    """Spectral value of the generator of the degree-``d``, grading-``k`` homology.

    Generators are added in increasing action; the value is the action at
    which the first cycle that is not a boundary appears.
    """
    rank = homology_rank(d, k, profile)
    if rank != 1:
        raise NoClass(f"homology in degree {d}, grading {k} has rank {rank}")
    here = differential(d, k, profile)
    above = differential(d, k + 1, profile)
    boundaries: dict[int, int] = {}
    for col in above.columns:
        v = _reduce(col, boundaries)
        if v:
            boundaries[v.bit_length() - 1] = v
    gens = here.cols
    order = sorted(range(len(gens)), key=lambda i: (gens.actions[i], str(gens.generators[i])))
    reduced: dict[int, tuple[int, int]] = {}
    for g in order:
        vec, combo = here.columns[g], 1 << g
        while vec:
            pivot = vec.bit_length() - 1
            hit = reduced.get(pivot)
            if hit is None:
                break
            vec ^= hit[0]
            combo ^= hit[1]
        if vec:
            reduced[vec.bit_length() - 1] = (vec, combo)
        elif _reduce(combo, boundaries):
            return gens.actions[g]
    raise NoClass(f"no essential cycle found in degree {d}, grading {k}")


def homology_table(d: int, profile: TwistProfile, window: Iterable[int] | None = None) -> list[tuple[int, int, object]]:
    """Rows ``(k, rank, min_max or None)`` over the grading window."""
    rows = []
    for k in (grading_window(d) if window is None else window):
        rank = homology_rank(d, k, profile)
        rows.append((k, rank, min_max(d, k, profile) if rank == 1 else None))
    return rows
