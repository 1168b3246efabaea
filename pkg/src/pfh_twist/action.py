"""Action of edges and lattice paths: ``A(P) = y + sum of edge actions``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lattice_path import Edge, LatticePath
from .profile import NUMERIC_CMP_TOL, SlopeOutOfRange, TwistProfile


@dataclass(frozen=True)
class ActionValue:
    value: Fraction | float
    start_term: int
    breakdown: tuple  # per-edge contributions, in path order

    def __float__(self):
        return float(self.value)


def edge_action(edge: Edge, profile: TwistProfile):
    """``0`` for slope 0, ``m h(1)/2`` for slope ``h'(1)``, else ``(m/2)(p(1 - z) + q h(z))``."""
    slope = edge.slope
    top = profile.hprime1
    if slope == 0:
        return Fraction(0) if profile.is_exact else 0.0
    if slope == top or (not profile.is_exact and abs(float(slope) - float(top)) <= NUMERIC_CMP_TOL):
        value = edge.m * profile.h1 / 2
        return value if profile.is_exact else float(value)
    if slope > top or slope < 0:
        raise SlopeOutOfRange(f"edge {edge} has slope outside [0, {top}]")
    z = profile.z_of_slope(slope)
    if not profile.is_exact:
        z = float(z)
        return edge.m * (edge.p * (1.0 - z) + edge.q * float(profile.h(z))) / 2.0
    return Fraction(edge.m, 2) * (edge.p * (1 - z) + edge.q * profile.h(z))


def path_action(path: LatticePath, profile: TwistProfile) -> ActionValue:
    parts = tuple(edge_action(e, profile) for e in path.edges)
    total = path.start_y + sum(parts, Fraction(0) if profile.is_exact else 0.0)
    return ActionValue(total, path.start_y, parts)


def action(path: LatticePath, profile: TwistProfile):
    """Shorthand for ``path_action(path, profile).value``."""
    return path_action(path, profile).value


def action_leq(a, b, tol: float = NUMERIC_CMP_TOL) -> bool:
    """``a <= b``, exact for rationals and up to ``tol`` otherwise."""
    if isinstance(a, (Fraction, int)) and isinstance(b, (Fraction, int)):
        return a <= b
    return float(a) <= float(b) + tol


def action_eq(a, b, tol: float = NUMERIC_CMP_TOL) -> bool:
    if isinstance(a, (Fraction, int)) and isinstance(b, (Fraction, int)):
        return a == b
    return abs(float(a) - float(b)) <= tol
