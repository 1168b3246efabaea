"""Spectral invariants ``c_{d,k}`` of a monotone twist.

For twists with integer ``h'(1)`` the invariant is the largest action among
all-``E`` paths of degree ``d`` with ``2 j(P) - d = k``.  Small degrees are
solved by enumeration; large degrees get a bracket ``lo <= c_{d,k} <= hi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor

from .action import action_eq, action_leq, path_action
from .complex import enumerate_generators, enumerate_shapes, lower_hull, min_max, round_corner_shape
from .index import index
from .lattice_path import Edge, LatticePath
from .profile import TwistProfile

BRUTE_CAP = 10
LABELED_CHECK_CAP = 6


class EmptyGrading(ValueError):
    """No path of the requested degree has the requested grading."""


class Mismatch(AssertionError):
    """A law that must hold exactly was violated."""


def c_dk_exact(d: int, k: int, profile: TwistProfile, *, cap: int = BRUTE_CAP,
               labeled_check_cap: int = LABELED_CHECK_CAP):
    """Maximum action over all-``E`` paths of degree ``d`` and grading ``k``.

    Up to ``labeled_check_cap`` the maximum over all labeled paths is also
    computed and must agree.
    """
    if d > cap:
        raise ValueError(f"degree {d} exceeds the brute-force cap {cap}")
    gens = enumerate_generators(d, k, profile, labeled=False)
    if not gens.actions:
        raise EmptyGrading(f"no all-E path of degree {d} has grading {k}")
    best = gens.actions[0]  # sorted by decreasing action
    if d <= labeled_check_cap:
        labeled = enumerate_generators(d, k, profile, labeled=True)
        if not action_eq(labeled.actions[0], best):
            raise Mismatch(f"labeled max {labeled.actions[0]} differs from all-E max {best} at d={d}, k={k}")
    return best


def exact_window(d: int, profile: TwistProfile, ks) -> dict[int, object]:
    """``c_{d,k}`` for the gradings in ``ks`` of parity ``d`` (others are empty)."""
    return {k: c_dk_exact(d, k, profile) for k in ks if (k - d) % 2 == 0}


def shift_law_check(d: int, profile: TwistProfile, ks) -> bool:
    """``c_{d,k+2d+2} = c_{d,k} + 1`` for every ``k`` in ``ks`` of parity ``d``."""
    for k in ks:
        if (k - d) % 2:
            continue
        lo, hi = c_dk_exact(d, k, profile), c_dk_exact(d, k + 2 * d + 2, profile)
        if not action_eq(hi, lo + 1):
            raise Mismatch(f"shift law fails at d={d}, k={k}: {hi} != {lo} + 1")
    return True


def monotonicity_check(d: int, profile: TwistProfile, ks) -> bool:
    """``c_{d,k} <= c_{d,k+2}`` for every ``k`` in ``ks`` of parity ``d``."""
    for k in ks:
        if (k - d) % 2:
            continue
        a, b = c_dk_exact(d, k, profile), c_dk_exact(d, k + 2, profile)
        if not action_leq(a, b):
            raise Mismatch(f"monotonicity fails at d={d}, k={k}: {a} > {b}")
    return True


# --------------------------------------------------------------------------
# Bracket for large degree


def step1_lattice_path(d: int, profile: TwistProfile) -> LatticePath:
    """All-``E`` path of degree ``d`` hugging the graph of ``h`` scaled by ``d/2``.

    Takes the lower convex hull of the points ``(X, ceil(g(X)))`` where
    ``g(X) = (d/2) h(2X/d - 1)``.  The hull stays within one unit above the
    scaled graph and its slopes lie in ``[0, h'(1)]``.
    """
    pts = []
    for x in range(d + 1):
        z = Fraction(2 * x, d) - 1 if profile.is_exact else 2.0 * x / d - 1.0
        g = Fraction(d, 2) * profile.h(z) if profile.is_exact else d / 2.0 * float(profile.h(z))
        pts.append((x, ceil(g) if profile.is_exact else ceil(g - 1e-12)))
    hull = lower_hull(pts)
    edges = tuple(Edge.from_vector(b[0] - a[0], b[1] - a[1]) for a, b in zip(hull, hull[1:]))
    return LatticePath(0, edges)


def _best_rounding(path: LatticePath, profile: TwistProfile) -> LatticePath:
    top = profile.slope_bound()
    best, best_value = None, None
    for corner in range(len(path.edges) + 1):
        candidate = round_corner_shape(path, corner)[0]
        if any(not 0 <= e.slope <= top for e in candidate.edges):
            continue
        value = path_action(candidate, profile).value
        if best is None or value > best_value:
            best, best_value = candidate, value
    if best is None:
        raise AssertionError(f"no admissible corner rounding of {path}")
    return best


def raise_to_grading(path: LatticePath, k: int, profile: TwistProfile) -> LatticePath:
    """Shift down and round corners of an all-``E`` path until its grading is ``k``.

    A downward shift lowers the grading by ``2d + 2`` and the action by 1;
    rounding an unlabeled corner raises the grading by 2 and never lowers
    the action, so the result witnesses ``c_{d,k} >= A(result)``.  Each step
    takes the admissible rounding of largest action.
    """
    d = path.degree
    if (k - d) % 2:
        raise EmptyGrading(f"grading {k} has the wrong parity for degree {d}")
    current = index(path)
    step = 2 * d + 2
    t = floor(Fraction(k - current, step))
    path = path.shift(t)
    current += t * step
    while current < k:
        path = _best_rounding(path, profile)
        current += 2
    if index(path) != k:
        raise AssertionError(f"raised path has grading {index(path)}, expected {k}")
    return path


@dataclass(frozen=True)
class Bracket:
    """``lo <= c_{d,k} <= hi``; ``slack`` is the gap of ``hi`` over ``d I / 4 + (k + d) / (2 d)``."""

    d: int
    k: int
    lo: object
    hi: object
    slack: object
    witness: LatticePath = field(repr=False)

    @property
    def width(self):
        return self.hi - self.lo


def upper_bound(d: int, k: int, profile: TwistProfile):
    """``d I / 4 + (k + d) / (2(d + 1))``.

    Every all-``E`` path of grading ``k`` has ``j = (k + d)/2`` and satisfies
    ``A <= d I/4 + S/d`` with ``S`` the area under it.  Being piecewise linear
    between integer abscissae, ``S = sum P(x) - (y + w)/2 <= j - (y + w)/2``,
    and convexity gives ``S <= d (y + w)/2``; together ``S <= j d/(d + 1)``.
    """
    quarter = profile.integral / 4
    if profile.is_exact:
        return d * quarter + Fraction(k + d, 2 * (d + 1))
    return d * float(quarter) + (k + d) / (2.0 * (d + 1))


def c_dk_bracket(d: int, k: int, profile: TwistProfile) -> Bracket:
    profile.slope_bound()
    witness = raise_to_grading(step1_lattice_path(d, profile), k, profile)
    lo = path_action(witness, profile).value
    hi = upper_bound(d, k, profile)
    slack = hi - (d * profile.integral / 4 + Fraction(k + d, 2 * d)) if profile.is_exact else \
        hi - (d * float(profile.integral) / 4 + (k + d) / (2.0 * d))
    return Bracket(d, k, lo, hi, slack, witness)


def calabi_estimate(value, d: int, k: int):
    """``c/d - k / (2(d^2 + d))``, the quantity that tends to the Calabi invariant."""
    if isinstance(value, (Fraction, int)):
        return Fraction(value) / d - Fraction(k, 2 * (d * d + d))
    return float(value) / d - k / (2.0 * (d * d + d))


# --------------------------------------------------------------------------
# Tables


@dataclass(frozen=True)
class SpectralRow:
    d: int
    k: int
    value: object  # exact value, or None for bracket rows
    method: str  # "brute", "minmax" or "bracket"
    lo: object = None
    hi: object = None


@dataclass
class SpectralTable:
    profile_id: str
    rows: list[SpectralRow] = field(default_factory=list)

    def values(self, method: str | None = None) -> dict[tuple[int, int], object]:
        return {(r.d, r.k): r.value for r in self.rows
                if r.value is not None and (method is None or r.method == method)}

    def consistent(self) -> bool:
        """Brute and min-max rows agree and every bracket has ``lo <= hi``."""
        brute, mm = self.values("brute"), self.values("minmax")
        for key in brute.keys() & mm.keys():
            if not action_eq(brute[key], mm[key]):
                return False
        return all(action_leq(r.lo, r.hi) for r in self.rows if r.method == "bracket")


def spectral_table(profile: TwistProfile, degrees, ks_for=None, *, method: str = "brute",
                   profile_id: str | None = None) -> SpectralTable:
    """Build a table; ``ks_for(d)`` gives the gradings (default: the parity-``d`` part of ``[-d, d]``)."""
    table = SpectralTable(profile_id or getattr(profile, "name", "profile"))
    for d in degrees:
        ks = ks_for(d) if ks_for else range(-d, d + 1, 2)
        for k in ks:
            if (k - d) % 2:
                continue
            if method == "brute":
                table.rows.append(SpectralRow(d, k, c_dk_exact(d, k, profile), "brute"))
            elif method == "minmax":
                table.rows.append(SpectralRow(d, k, min_max(d, k, profile), "minmax"))
            elif method == "bracket":
                b = c_dk_bracket(d, k, profile)
                table.rows.append(SpectralRow(d, k, None, "bracket", b.lo, b.hi))
            else:
                raise ValueError(f"unknown method {method!r}")
    return table


def shape_count(d: int, profile: TwistProfile, labeled: bool = False) -> int:
    return len(enumerate_shapes(d, profile, labeled))


__all__ = [
    "BRUTE_CAP", "Bracket", "EmptyGrading", "Mismatch", "SpectralRow", "SpectralTable",
    "c_dk_bracket", "c_dk_exact", "calabi_estimate", "exact_window",
    "monotonicity_check", "raise_to_grading", "shape_count", "shift_law_check",
    "spectral_table", "step1_lattice_path", "upper_bound",
]
