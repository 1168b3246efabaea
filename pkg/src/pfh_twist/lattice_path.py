"""Labeled concave lattice paths, the combinatorial form of PFH generators.

A path starts at ``(0, y)`` and is a concatenation of edges ``m * (q, p)``
with ``gcd(p, q) = 1`` in strictly increasing slope order.  Edges carry a
label ``E`` (elliptic) or ``H`` (contains one hyperbolic orbit).  The text
form is ``y; (q,p)xm:L; ...`` (``xm`` and ``:L`` optional), e.g. ``-3; (3,1)x1:H; (1,2)x2:E``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

E, H = "E", "H"


class InvalidOrbitSet(ValueError):
    pass


class PathSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    """Edge vector ``m * (q, p)``; ``(q, p)`` primitive, ``q >= 1``."""

    q: int
    p: int
    m: int = 1
    label: str = E

    def __post_init__(self):
        if self.q < 1 or self.m < 1 or gcd(self.p, self.q) != 1:
            raise ValueError(f"bad edge ({self.q},{self.p})x{self.m}")
        if self.label not in (E, H):
            raise ValueError(f"label must be E or H, got {self.label!r}")

    @property
    def slope(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def vector(self) -> tuple[int, int]:
        return (self.m * self.q, self.m * self.p)

    def with_label(self, label: str) -> "Edge":
        return Edge(self.q, self.p, self.m, label)

    def with_multiplicity(self, m: int) -> "Edge":
        return Edge(self.q, self.p, m, self.label)

    def __str__(self):
        return f"({self.q},{self.p})x{self.m}:{self.label}"

    @classmethod
    def from_vector(cls, dx: int, dy: int, label: str = E) -> "Edge":
        g = gcd(dx, dy)
        return cls(dx // g, dy // g, g, label)


@dataclass(frozen=True)
class LatticePath:
    start_y: int
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))

    # --- basic quantities -------------------------------------------------
    @property
    def degree(self) -> int:
        return sum(e.m * e.q for e in self.edges)

    @property
    def rise(self) -> int:
        """Vertical displacement ``V``."""
        return sum(e.m * e.p for e in self.edges)

    @property
    def end_y(self) -> int:
        return self.start_y + self.rise

    @property
    def h_count(self) -> int:
        return sum(1 for e in self.edges if e.label == H)

    @property
    def total_multiplicity(self) -> int:
        return sum(e.m for e in self.edges)

    def vertices(self) -> list[tuple[int, int]]:
        x, y = 0, self.start_y
        out = [(x, y)]
        for e in self.edges:
            x += e.m * e.q
            y += e.m * e.p
            out.append((x, y))
        return out

    def lattice_points(self) -> list[tuple[int, int]]:
        """All lattice points on the path, left to right."""
        x, y = 0, self.start_y
        out = [(x, y)]
        for e in self.edges:
            for _ in range(e.m):
                x += e.q
                y += e.p
                out.append((x, y))
        return out

    def height(self, x) -> Fraction:
        """Exact height of the path above abscissa ``x``."""
        x0, y0 = 0, self.start_y
        for e in self.edges:
            dx = e.m * e.q
            if x <= x0 + dx:
                return y0 + Fraction(e.p, e.q) * (x - x0)
            x0 += dx
            y0 += e.m * e.p
        raise ValueError(f"x={x} outside [0, {self.degree}]")

    def column_ceilings(self) -> list[int]:
        """``ceil(P(x))`` for ``x = 0..d`` in integer arithmetic."""
        out = [self.start_y]
        y0 = self.start_y
        for e in self.edges:
            for t in range(1, e.m * e.q + 1):
                out.append(y0 + -((-e.p * t) // e.q))
            y0 += e.m * e.p
        return out

    # --- transformations --------------------------------------------------
    def shift(self, k: int) -> "LatticePath":
        return LatticePath(self.start_y + k, self.edges)

    def unlabeled(self) -> "LatticePath":
        return LatticePath(self.start_y, tuple(e.with_label(E) for e in self.edges))

    def shape(self) -> "LatticePath":
        """The same edges starting at height 0."""
        return LatticePath(0, self.edges)

    # --- serialization ----------------------------------------------------
    def __str__(self):
        return "; ".join([str(self.start_y)] + [str(e) for e in self.edges])

    _EDGE_RE = re.compile(r"^\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)\s*(?:x\s*(\d+))?\s*(?::\s*([EH]))?$")

    @classmethod
    def parse(cls, text: str) -> "LatticePath":
        parts = [s.strip() for s in text.strip().split(";")]
        parts = [s for s in parts if s]
        if len(parts) < 2:
            raise PathSyntaxError(f"expected 'y; (q,p)xm:L; ...', got {text!r}")
        try:
            y = int(parts[0])
        except ValueError as exc:
            raise PathSyntaxError(f"bad start height {parts[0]!r}") from exc
        edges = []
        for chunk in parts[1:]:
            match = cls._EDGE_RE.match(chunk)
            if not match:
                raise PathSyntaxError(f"bad edge {chunk!r}")
            q, p, m, label = match.groups()
            m = int(m) if m else 1
            dx, dy = int(q) * m, int(p) * m
            try:
                edge = Edge.from_vector(dx, dy, label or E)
            except (ValueError, ZeroDivisionError) as exc:
                raise PathSyntaxError(f"bad edge {chunk!r}: {exc}") from exc
            edges.append(edge)
        return cls(y, tuple(edges))


def make_path(start_y: int, edges: Iterable[tuple]) -> LatticePath:
    """Build a path from ``(q, p, m[, label])`` tuples, normalising to primitive vectors."""
    out = []
    for spec in edges:
        q, p, m = spec[:3]
        label = spec[3] if len(spec) > 3 else E
        out.append(Edge.from_vector(q * m, p * m, label))
    return LatticePath(start_y, tuple(out))


def validate(path: LatticePath, profile) -> list[str]:
    """List every violated invariant of ``path`` relative to ``profile`` (empty if valid)."""
    problems = []
    if not path.edges:
        problems.append("path has no edges (degree must be positive)")
    if not isinstance(path.start_y, int):
        problems.append(f"start height {path.start_y!r} is not an integer")
    top = profile.hprime1
    prev = None
    for i, e in enumerate(path.edges):
        s = e.slope
        if prev is not None and s <= prev:
            problems.append(f"edge {i} {e}: slopes not strictly increasing ({prev} then {s})")
        prev = s
        if s < 0:
            problems.append(f"edge {i} {e}: negative slope")
        if s > top:
            problems.append(f"edge {i} {e}: slope {s} exceeds h'(1) = {top}")
        if e.label == H and not 0 < s < top:
            problems.append(f"edge {i} {e}: H label only allowed for slopes in (0, h'(1))")
    return problems


# --------------------------------------------------------------------------
# Orbit sets


@dataclass(frozen=True)
class Orbit:
    """A simple orbit: ``gamma-``, ``gamma+`` or ``e``/``h`` at rotation ``slope``."""

    kind: str
    slope: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("gamma-", "gamma+", "e", "h"):
            raise InvalidOrbitSet(f"unknown orbit kind {self.kind!r}")
        if self.kind in ("e", "h"):
            if self.slope is None:
                raise InvalidOrbitSet(f"{self.kind} orbit needs a slope")
            object.__setattr__(self, "slope", Fraction(self.slope))

    @property
    def period(self) -> int:
        return 1 if self.slope is None else self.slope.denominator

    def __str__(self):
        return self.kind if self.slope is None else f"{self.kind}_{self.slope}"

    @classmethod
    def parse(cls, text: str) -> "Orbit":
        text = text.strip()
        if text in ("gamma-", "gamma+"):
            return cls(text)
        kind, _, slope = text.partition("_")
        if kind not in ("e", "h") or not slope:
            raise InvalidOrbitSet(f"bad orbit {text!r}")
        return cls(kind, Fraction(slope.strip("{}")))


def from_orbit_set(orbits: Sequence[tuple[Orbit, int]], shift: int, top_slope) -> LatticePath:
    """Concatenate ``v_-``, ``v_{p,q}`` (merged per slope) and ``v_+`` into a path at height ``shift``.

    ``top_slope`` is ``ceil(h'(1))``, the slope of the north-pole edge; a
    profile object is also accepted.
    """
    if hasattr(top_slope, "hprime1"):
        top = Fraction(top_slope.hprime1)
        top = Fraction(-((-top.numerator) // top.denominator))
    else:
        top = Fraction(top_slope)
    merged: dict[Fraction, list] = {}
    for orbit, mult in orbits:
        if mult < 1:
            raise InvalidOrbitSet(f"multiplicity of {orbit} must be positive")
        if orbit.kind == "gamma-":
            slope = Fraction(0)
        elif orbit.kind == "gamma+":
            slope = top
        else:
            slope = orbit.slope
            if not 0 < slope < top:
                raise InvalidOrbitSet(f"{orbit} has rotation outside (0, {top})")
        entry = merged.setdefault(slope, [0, False])
        if orbit.kind == "h":
            if mult != 1:
                raise InvalidOrbitSet(f"hyperbolic orbit {orbit} must have multiplicity 1")
            if entry[1]:
                raise InvalidOrbitSet(f"{orbit} listed twice")
            entry[1] = True
        entry[0] += mult
    if not merged:
        raise InvalidOrbitSet("empty orbit set")
    edges = []
    for slope in sorted(merged):
        mult, has_h = merged[slope]
        edges.append(Edge(slope.denominator, slope.numerator, mult, H if has_h else E))
    return LatticePath(shift, tuple(edges))


def to_orbit_set(path: LatticePath, top_slope) -> list[tuple[Orbit, int]]:
    """Inverse of :func:`from_orbit_set`."""
    top = Fraction(top_slope)
    out: list[tuple[Orbit, int]] = []
    for e in path.edges:
        s = e.slope
        if s == 0:
            out.append((Orbit("gamma-"), e.m))
        elif s == top:
            out.append((Orbit("gamma+"), e.m))
        elif e.label == H:
            if e.m > 1:
                out.append((Orbit("e", s), e.m - 1))
            out.append((Orbit("h", s), 1))
        else:
            out.append((Orbit("e", s), e.m))
    return out
