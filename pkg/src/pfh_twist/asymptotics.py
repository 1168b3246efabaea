"""Dual norms, isoperimetric identities and the Calabi convergence experiment.

``Omega`` is the convex region ``{-1 <= x <= 1, h(x) <= y <= top}`` with
``top = h(1)`` by default (``top = E`` gives ``Omega_E``).  Its dual norm is
the support function ``||v||* = max_{w in Omega} v . w``.  ``hat`` variants
refer to ``Omega`` rotated clockwise by ninety degrees.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from scipy import integrate

from .action import path_action
from .complex import lower_hull
from .index import index
from .lattice_path import LatticePath, make_path
from .parallel import pmap
from .profile import QUAD_RTOL, TwistProfile, calabi
from .spectral import BRUTE_CAP, c_dk_bracket, c_dk_exact, calabi_estimate, step1_lattice_path


class EpsilonInfeasible(ValueError):
    """The constructed path misses one of the three closeness checks."""

    def __init__(self, message: str, deviations: dict):
        super().__init__(message)
        self.deviations = deviations


def rotate_cw(v):
    """Clockwise quarter turn ``(x, y) -> (y, -x)``."""
    return (v[1], -v[0])


def rotate_ccw(v):
    return (-v[1], v[0])


class DualRegion:
    def __init__(self, profile: TwistProfile, top=None):
        self.profile = profile
        self.top = profile.h1 if top is None else top
        if self.top < profile.h1:
            raise ValueError(f"top {self.top} lies below h(1) = {profile.h1}")
        exact = profile.is_exact and isinstance(self.top, (Fraction, int))
        self.exact = exact
        one = Fraction(1) if exact else 1.0
        self.corners = ((-one, 0 * one), (-one, self.top * one), (one, self.top * one), (one, profile.h1 * one))

    @property
    def area(self):
        """``2 top - I``."""
        return 2 * self.top - self.profile.integral

    def arc_point(self, x):
        return (x, self.profile.h(x))

    def _support_point(self, v):
        vx, vy = v
        best = max(self.corners, key=lambda w: vx * w[0] + vy * w[1])
        if vy < 0:
            slope = -Fraction(vx) / vy if self.exact else -float(vx) / float(vy)
            if 0 < slope < self.profile.hprime1:
                z = self.profile.z_of_slope(slope)
                w = self.arc_point(z)
                if vx * w[0] + vy * w[1] > vx * best[0] + vy * best[1]:
                    best = w
        return best

    def dual_norm(self, v):
        """``max_{w in Omega} v . w``; exact for quadratic profiles and rational ``v``."""
        if not self.exact:
            v = (float(v[0]), float(v[1]))
        w = self._support_point(v)
        return v[0] * w[0] + v[1] * w[1]

    def dual_norm_hat(self, v):
        """Dual norm of the rotated region: ``||v||*_hat = ||R^{-1} v||*``."""
        return self.dual_norm(rotate_ccw(v))

    def boundary_length_hat(self) -> float:
        """``l(d Omega_hat)``: the rotated boundary tangents measured in ``||.||*``.

        The arc contributes ``int ||(h'(x), -1)||* dx`` (adaptive quadrature),
        the top edge ``2 top`` and the left edge ``top``.
        """
        prof = self.profile

        def integrand(x):
            return float(self.dual_norm((prof.hprime(x), -1.0)))

        arc, _ = integrate.quad(integrand, -1.0, 1.0, epsabs=1e-14, epsrel=QUAD_RTOL, limit=400,
                                points=getattr(prof, "breakpoints", None) or None)
        top = float(self.top)
        return arc + 2 * top + top


@dataclass(frozen=True)
class ClosedPolygon:
    """Closed polygon given by its vertex cycle (last vertex joins the first)."""

    vertices: tuple

    @property
    def edges(self) -> list[tuple]:
        vs = self.vertices
        return [(vs[(i + 1) % len(vs)][0] - vs[i][0], vs[(i + 1) % len(vs)][1] - vs[i][1])
                for i in range(len(vs))]

    @property
    def signed_area(self):
        vs = self.vertices
        s = sum(vs[i][0] * vs[(i + 1) % len(vs)][1] - vs[(i + 1) % len(vs)][0] * vs[i][1]
                for i in range(len(vs)))
        return Fraction(s, 2) if all(isinstance(c, (int, Fraction)) for v in vs for c in v) else s / 2

    @property
    def area(self):
        return abs(self.signed_area)

    def is_convex(self) -> bool:
        es = [e for e in self.edges if e != (0, 0)]
        crosses = [es[i][0] * es[(i + 1) % len(es)][1] - es[i][1] * es[(i + 1) % len(es)][0]
                   for i in range(len(es))]
        return all(c >= 0 for c in crosses) or all(c <= 0 for c in crosses)

    def rotated_cw(self) -> "ClosedPolygon":
        return ClosedPolygon(tuple(rotate_cw(v) for v in self.vertices))

    def scaled(self, factor) -> "ClosedPolygon":
        return ClosedPolygon(tuple((factor * x, factor * y) for x, y in self.vertices))


def lambda_polygon(path: LatticePath) -> ClosedPolygon:
    """Close ``P`` with a vertical edge before it and a horizontal edge after it, then rotate.

    Traversed counterclockwise the region above ``P`` has edges ``(0, -V)``,
    the edges of ``P`` and ``(-d, 0)``.
    """
    y, V = path.start_y, path.rise
    verts = [(0, y + V)] + path.vertices()
    return ClosedPolygon(tuple(verts)).rotated_cw()


def lambda_e_polygon(path: LatticePath, E) -> ClosedPolygon:
    """Boundary of the region between ``P`` and the line at height ``y + dE/2``, rotated."""
    y, d = path.start_y, path.degree
    lid = y + d * E / 2
    if lid < path.end_y:
        raise ValueError(f"E = {E} must exceed 2V/d = {Fraction(2 * path.rise, d)}")
    verts = [(0, lid)] + path.vertices() + [(d, lid)]
    verts = [v for i, v in enumerate(verts) if i == 0 or v != verts[i - 1]]
    return ClosedPolygon(tuple(verts)).rotated_cw()


def length(polygon: ClosedPolygon, region: DualRegion):
    """Sum of the dual norms of the edge vectors."""
    return sum((region.dual_norm(e) for e in polygon.edges), Fraction(0) if region.exact else 0.0)


def lambda_length_formula(path: LatticePath, profile: TwistProfile):
    """``d h(1) + 2y + 2V - 2 A(P)``."""
    return path.degree * profile.h1 + 2 * path.start_y + 2 * path.rise - 2 * path_action(path, profile).value


def lambda_e_length_formula(path: LatticePath, profile: TwistProfile, E):
    """``2 d E + 2 y - 2 A(P)``."""
    return 2 * path.degree * E + 2 * path.start_y - 2 * path_action(path, profile).value


def area_above_base(path: LatticePath):
    """``a(P)``: area between ``P``, the line at height ``y`` and the line ``x = d``."""
    y, d = path.start_y, path.degree
    poly = ClosedPolygon(tuple(path.vertices()) + ((d, y),))
    return poly.area


def step2_gap(path: LatticePath, profile: TwistProfile):
    """``I/4 - (A/d - (a + d y)/d^2)``, non-negative for every path."""
    d = path.degree
    a = area_above_base(path)
    value = path_action(path, profile).value
    if profile.is_exact:
        return profile.integral / 4 - (value / d - (a + d * path.start_y) / Fraction(d * d))
    return float(profile.integral) / 4 - (float(value) / d - (float(a) + d * path.start_y) / d ** 2)


@dataclass(frozen=True)
class IsoperimetricCheck:
    lhs: float  # l^2
    rhs: float  # 4 A(Omega) A(Gamma)

    @property
    def ok(self) -> bool:
        return self.lhs >= self.rhs - 1e-9 * max(1.0, abs(self.rhs))


def isoperimetric(polygon: ClosedPolygon, region: DualRegion) -> IsoperimetricCheck:
    ell = length(polygon, region)
    return IsoperimetricCheck(float(ell) ** 2, 4 * float(region.area) * float(polygon.area))


def relative_error(value, expected) -> float:
    value, expected = float(value), float(expected)
    return abs(value - expected) / max(abs(expected), 1e-300)


@dataclass(frozen=True)
class IdentityReport:
    boundary_length: float
    boundary_expected: float
    boundary_rel_err: float
    paths_checked: int
    worst_lambda_rel_err: float
    worst_lambda_e_rel_err: float
    isoperimetric_violations: tuple
    step2_violations: tuple

    @property
    def ok(self) -> bool:
        return (self.boundary_rel_err <= 1e-6 and self.worst_lambda_rel_err <= 1e-6
                and self.worst_lambda_e_rel_err <= 1e-6
                and not self.isoperimetric_violations and not self.step2_violations)


def random_path(rng: random.Random, d: int, top: int, y_range: int = 5) -> LatticePath:
    """A random all-``E`` concave path of degree ``d`` with slopes in ``[0, top]``."""
    xs = sorted(rng.sample(range(1, d), rng.randint(0, d - 1))) if d > 1 else []
    widths = [b - a for a, b in zip([0] + xs, xs + [d])]
    slopes = sorted(Fraction(rng.randint(0, top * 6), 6) for _ in widths)
    edges = []
    for w, s in zip(widths, slopes):
        rise = math.floor(s * w)
        edges.append((w, rise))
    verts = [(0, 0)]
    for w, r in edges:
        verts.append((verts[-1][0] + w, verts[-1][1] + r))
    # the hull removes any non-convex joints created by rounding down
    hull = lower_hull(verts)
    spec = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        g = math.gcd(x1 - x0, y1 - y0)
        spec.append(((x1 - x0) // g, (y1 - y0) // g, g))
    return make_path(rng.randint(-y_range, y_range), spec)


def identity_report(profile: TwistProfile, paths, energies=(None,)) -> IdentityReport:
    """Length identities, isoperimetric inequality and the per-path step-2 bound.

    ``energies`` lists extra heights ``E`` for the ``Omega_E`` variant; ``None``
    means ``E = max(h(1), 2V/d) + 1`` per path.
    """
    region = DualRegion(profile)
    bl = region.boundary_length_hat()
    expected = 2 * (2 * float(profile.h1) - float(profile.integral))
    worst = worst_e = 0.0
    iso_bad, step2_bad = [], []
    count = 0
    for path in paths:
        count += 1
        lam = lambda_polygon(path)
        worst = max(worst, relative_error(length(lam, region), lambda_length_formula(path, profile)))
        if not isoperimetric(lam, region).ok:
            iso_bad.append(("Lambda", str(path)))
        for E in energies:
            if E is None:
                E = max(Fraction(profile.h1) if profile.is_exact else profile.h1,
                        Fraction(2 * path.rise, path.degree)) + 1
            reg_e = DualRegion(profile, E)
            lam_e = lambda_e_polygon(path, E)
            worst_e = max(worst_e, relative_error(length(lam_e, reg_e), lambda_e_length_formula(path, profile, E)))
            if abs(float(reg_e.area) - (2 * float(E) - float(profile.integral))) > 1e-9 * float(E):
                iso_bad.append(("A(Omega_E)", str(path)))
            if not isoperimetric(lam_e, reg_e).ok:
                iso_bad.append(("Lambda_E", str(path)))
        if step2_gap(path, profile) < -1e-12:
            step2_bad.append(str(path))
    return IdentityReport(bl, expected, relative_error(bl, expected), count, worst, worst_e,
                          tuple(iso_bad), tuple(step2_bad))


# --------------------------------------------------------------------------
# The approximating path family


@dataclass(frozen=True)
class Step1Result:
    path: LatticePath
    d: int
    k: int  # grading of the path
    graph_deviation: float  # (A), in unscaled coordinates
    length_deviation: float  # (B)
    area_deviation: float  # (C)
    action_gap: float  # |A/d - I/2|
    grading_gap: float  # |k/(2(d^2+d)) - I/4|

    @property
    def deviations(self) -> dict:
        return {"A": self.graph_deviation, "B": self.length_deviation, "C": self.area_deviation}


def _graph_deviation(path: LatticePath, profile: TwistProfile, per_unit: int = 16) -> float:
    d = path.degree
    worst = 0.0
    for x0 in range(d):
        y0, y1 = float(path.height(x0)), float(path.height(x0 + 1))
        for t in range(per_unit + 1):
            x = x0 + t / per_unit
            y = y0 + (y1 - y0) * t / per_unit
            worst = max(worst, abs(2 * y / d - float(profile.h(2 * x / d - 1))))
    return worst


def step1_path(eps: float, d: int, profile: TwistProfile, *, check: bool = True) -> Step1Result:
    """All-``E`` path of degree ``d`` approximating the scaled graph of ``h``.

    Vertices in unscaled coordinates are ``(2X/d - 1, 2Y/d)``.  With ``check``
    the three closeness conditions are enforced at tolerance ``eps``.
    """
    path = step1_lattice_path(d, profile)
    k = index(path)
    region = DualRegion(profile)
    I, h1 = float(profile.integral), float(profile.h1)
    ell = 2.0 * float(length(lambda_polygon(path), region)) / d
    area = 4.0 * float(sum(path.height(x) for x in range(d + 1)) - Fraction(path.start_y + path.end_y, 2)) / d ** 2
    A = float(path_action(path, profile).value)
    result = Step1Result(
        path, d, k,
        _graph_deviation(path, profile),
        abs(ell - 2 * (2 * h1 - I)),
        abs(area - I),
        abs(A / d - I / 2),
        abs(k / (2.0 * (d * d + d)) - I / 4),
    )
    if check:
        failed = {name: dev for name, dev in result.deviations.items() if dev > eps}
        if failed:
            raise EpsilonInfeasible(f"degree {d} misses eps={eps} on {sorted(failed)}", result.deviations)
    return result


def step1_threshold(eps: float, profile: TwistProfile, d_max: int = 400) -> int | None:
    """Smallest ``d <= d_max`` from which every degree up to ``d_max`` passes (scanned coarsely)."""
    ok_from = None
    for d in range(1, d_max + 1):
        try:
            step1_path(eps, d, profile)
            if ok_from is None:
                ok_from = d
        except EpsilonInfeasible:
            ok_from = None
    return ok_from


# --------------------------------------------------------------------------
# Convergence table


K_RULES = ("k=-d", "step1", "fixed-residue")


def grading_for(rule: str, d: int, profile: TwistProfile) -> int:
    if rule == "k=-d":
        return -d
    if rule == "step1":
        return index(step1_lattice_path(d, profile))
    if rule == "fixed-residue":
        return d % 2
    raise ValueError(f"unknown k rule {rule!r}; choose from {K_RULES}")


@dataclass(frozen=True)
class ConvergenceRow:
    d: int
    k: int
    estimate: object
    error: float
    lo: object
    hi: object
    method: str

    @property
    def width(self):
        return self.hi - self.lo


def convergence_row(d: int, profile: TwistProfile, rule: str = "k=-d", brute_cap: int = BRUTE_CAP) -> ConvergenceRow:
    k = grading_for(rule, d, profile)
    cal = calabi(profile)
    if d <= brute_cap:
        est = calabi_estimate(c_dk_exact(d, k, profile, cap=brute_cap), d, k)
        return ConvergenceRow(d, k, est, abs(float(est - cal)), est, est, "brute")
    b = c_dk_bracket(d, k, profile)
    lo, hi = calabi_estimate(b.lo, d, k), calabi_estimate(b.hi, d, k)
    mid = (lo + hi) / 2
    return ConvergenceRow(d, k, mid, abs(float(mid - cal)), lo, hi, "bracket")


def convergence_table(profile: TwistProfile, d_list, k_rule: str = "k=-d",
                      brute_cap: int = BRUTE_CAP) -> list[ConvergenceRow]:
    """Rows ``(d, k, estimate, |estimate - Cal|, lo, hi)`` of ``c_{d,k}/d - k/(2(d^2 + d))``."""
    if k_rule not in K_RULES:
        raise ValueError(f"unknown k rule {k_rule!r}; choose from {K_RULES}")
    return pmap(lambda d: convergence_row(d, profile, k_rule, brute_cap), list(d_list))
