"""Twist profiles h(z) on the sphere and radial twists of the disc.

A monotone twist of the disc is the time-one map of ``H = h(z)/2`` on the
sphere with area form ``d(theta) ^ dz / (4 pi)``; the disc sits in the
northern hemisphere via ``z = 1 - r**2``.  Two concrete profile kinds exist:

* :class:`PolynomialProfile` -- rational coefficients in powers of ``z + 1``.
  When ``h`` is quadratic every derived quantity (``z_{p,q}``, actions,
  dual norms) is an exact :class:`~fractions.Fraction`.
* :class:`NumericProfile` -- callables or a sample table; roots by bracketing
  and integrals by adaptive quadrature.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline

ROOT_TOL = 1e-12
QUAD_RTOL = 1e-10
CROSS_TOL = 1e-8
NUMERIC_CMP_TOL = 1e-9

Number = Fraction | float


class ProfileError(ValueError):
    """Raised for malformed profile definitions or config files."""


class SlopeOutOfRange(ValueError):
    pass


class DivergentCalabi(ArithmeticError):
    """The Calabi integral of a disc twist does not converge."""

    def __init__(self, message: str, partial_values: Sequence[float] = ()):
        super().__init__(message)
        self.partial_values = tuple(partial_values)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float) and value.is_integer():
        return Fraction(int(value))
    raise ProfileError(f"exact profiles need rational coefficients, got {value!r}")


class TwistProfile:
    """Common interface of twist profiles.

    Subclasses provide ``h``, ``hprime``, ``hsecond`` and the scalars
    ``h1 = h(1)``, ``hprime1 = h'(1)`` and ``integral = int_{-1}^{1} h``.
    """

    kind: str = "abstract"
    name: str = "profile"

    @property
    def is_exact(self) -> bool:
        """True when actions of lattice paths are exact rationals."""
        return False

    def h(self, z):
        raise NotImplementedError

    def hprime(self, z):
        raise NotImplementedError

    def hsecond(self, z):
        raise NotImplementedError

    @property
    def h1(self) -> Number:
        raise NotImplementedError

    @property
    def hprime1(self) -> Number:
        raise NotImplementedError

    @property
    def integral(self) -> Number:
        raise NotImplementedError

    def _solve_slope(self, slope):
        raise NotImplementedError

    def slope_bound(self) -> int:
        """``h'(1)`` as a positive integer; spectral operations require it."""
        value = self.hprime1
        if isinstance(value, Fraction):
            if value.denominator == 1 and value > 0:
                return int(value)
        elif math.isfinite(value) and value > 0 and abs(value - round(value)) <= NUMERIC_CMP_TOL:
            return int(round(value))
        raise ProfileError(f"h'(1) = {value} is not a positive integer")

    def z_of_slope(self, slope) -> Number:
        """Solve ``h'(z) = slope`` for ``0 < slope < h'(1)``."""
        if not 0 < slope < self.hprime1:
            raise SlopeOutOfRange(f"slope {slope} outside (0, {self.hprime1})")
        return _cached_root(self, slope)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "h(1)": self.h1,
            "h'(1)": self.hprime1,
            "I": self.integral,
            "Cal": calabi(self),
        }


@lru_cache(maxsize=65536)
def _cached_root(profile: TwistProfile, slope):
    return profile._solve_slope(slope)


class PolynomialProfile(TwistProfile):
    """``h(z) = sum_i c_i (z + 1)**i`` with rational ``c_i``."""

    kind = "exact"

    def __init__(self, coefficients: Sequence, name: str = "polynomial"):
        coeffs = [_as_fraction(c) for c in coefficients]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients: tuple[Fraction, ...] = tuple(coeffs)
        self.name = name
        self._d1 = tuple(i * c for i, c in enumerate(coeffs))[1:]
        self._d2 = tuple(i * c for i, c in enumerate(self._d1))[1:]

    def __repr__(self):
        return f"PolynomialProfile({[str(c) for c in self.coefficients]}, name={self.name!r})"

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_exact(self) -> bool:
        return self.degree <= 2

    @staticmethod
    def _horner(coeffs, u):
        acc = 0
        for c in reversed(coeffs):
            acc = acc * u + c
        return acc

    def _eval(self, coeffs, z):
        u = z + 1
        if isinstance(z, float):
            return float(self._horner([float(c) for c in coeffs], u))
        return self._horner(coeffs, u)

    def h(self, z):
        return self._eval(self.coefficients, z)

    def hprime(self, z):
        return self._eval(self._d1, z) if self._d1 else 0 * z

    def hsecond(self, z):
        return self._eval(self._d2, z) if self._d2 else 0 * z

    @property
    def h1(self) -> Fraction:
        return self.h(Fraction(1))

    @property
    def hprime1(self) -> Fraction:
        return Fraction(self.hprime(Fraction(1)))

    @property
    def integral(self) -> Fraction:
        return sum((c * Fraction(2) ** (i + 1) / (i + 1) for i, c in enumerate(self.coefficients)),
                   Fraction(0))

    def _solve_slope(self, slope):
        if self.degree == 2:
            c1, c2 = self.coefficients[1], self.coefficients[2]
            return (Fraction(slope) - c1) / (2 * c2) - 1
        target = float(slope)
        return optimize.brentq(lambda z: float(self.hprime(float(z))) - target, -1.0, 1.0,
                               xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


class NumericProfile(TwistProfile):
    """Profile given by callables (or a sample table)."""

    kind = "numeric"

    def __init__(self, h: Callable[[float], float], hprime: Callable[[float], float],
                 hprime1: float | None = None, *, hsecond: Callable[[float], float] | None = None,
                 h1: float | None = None, integral: float | None = None,
                 breakpoints: Sequence[float] = (), name: str = "numeric"):
        self._h = h
        self._hprime = hprime
        self._hsecond = hsecond
        self.name = name
        self.breakpoints = tuple(sorted(b for b in breakpoints if -1.0 < b < 1.0))
        self._hprime1 = float(hprime(1.0)) if hprime1 is None else float(hprime1)
        self._h1 = float(h(1.0)) if h1 is None else float(h1)
        self._integral = integral

    def __repr__(self):
        return f"NumericProfile(name={self.name!r}, h'(1)={self._hprime1})"

    @classmethod
    def from_table(cls, z: Sequence[float], values: Sequence[float], hprime1: float | None = None,
                   name: str = "table") -> "NumericProfile":
        """Interpolate samples with a not-a-knot cubic spline (exact on cubics)."""
        z = np.asarray(z, dtype=float)
        values = np.asarray(values, dtype=float)
        if z.ndim != 1 or z.shape != values.shape or len(z) < 4:
            raise ProfileError("sample table needs at least four (z, h) rows")
        if abs(z[0] + 1) > 1e-12 or abs(z[-1] - 1) > 1e-12 or np.any(np.diff(z) <= 0):
            raise ProfileError("table abscissae must increase from -1 to 1")
        spline = CubicSpline(z, values)
        d1, d2 = spline.derivative(1), spline.derivative(2)
        return cls(lambda t: float(spline(t)), lambda t: float(d1(t)), hprime1,
                   hsecond=lambda t: float(d2(t)), name=name)

    @classmethod
    def from_functions(cls, h, hprime, name="numeric", **kwargs) -> "NumericProfile":
        return cls(h, hprime, name=name, **kwargs)

    def h(self, z):
        return float(self._h(float(z)))

    def hprime(self, z):
        return float(self._hprime(float(z)))

    def hsecond(self, z):
        if self._hsecond is not None:
            return float(self._hsecond(float(z)))
        step = 1e-5
        lo, hi = max(-1.0, z - step), min(1.0, z + step)
        return (self.hprime(hi) - self.hprime(lo)) / (hi - lo)

    @property
    def h1(self) -> float:
        return self._h1

    @property
    def hprime1(self) -> float:
        return self._hprime1

    @property
    def integral(self) -> float:
        if self._integral is None:
            value, _ = integrate.quad(self.h, -1.0, 1.0, points=self.breakpoints or None,
                                      epsabs=0.0, epsrel=QUAD_RTOL * 1e-2, limit=400)
            self._integral = value
        return self._integral

    def _solve_slope(self, slope):
        target = float(slope)
        return optimize.brentq(lambda z: self.hprime(z) - target, -1.0, 1.0,
                               xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def z_of_slope(profile: TwistProfile, slope) -> Number:
    """Return ``z`` with ``h'(z) = slope``; exact for quadratic polynomial profiles."""
    return profile.z_of_slope(slope)


def calabi(profile: TwistProfile) -> Number:
    """Calabi invariant ``I / 4`` of the twist generated by ``h(z)/2``."""
    return profile.integral / 4


def validate_profile(profile: TwistProfile, *, strict: bool = True, samples: int = 201) -> list[str]:
    """Check ``h(-1) = h'(-1) = 0`` and positivity of ``h'``, ``h''``.

    ``strict`` demands ``h' > 0`` and ``h'' > 0`` on the open interval; the
    non-strict variant (``>= 0``) is what disc-twist profiles satisfy.
    """
    problems: list[str] = []
    if isinstance(profile, PolynomialProfile):
        zero = Fraction(-1)
        tol = 0
    else:
        zero = -1.0
        tol = NUMERIC_CMP_TOL
    if abs(profile.h(zero)) > tol:
        problems.append(f"h(-1) = {profile.h(zero)} != 0")
    if abs(profile.hprime(zero)) > tol:
        problems.append(f"h'(-1) = {profile.hprime(zero)} != 0")
    interior = np.linspace(-1.0, 1.0, samples + 2)[1:-1]
    if isinstance(profile, PolynomialProfile):
        points = [Fraction(i, samples + 1) * 2 - 1 for i in range(1, samples + 1)]
    else:
        points = list(interior)
    for z in points:
        d1, d2 = profile.hprime(z), profile.hsecond(z)
        if d1 < -tol or (strict and d1 <= 0):
            problems.append(f"h'({float(z):.6g}) = {float(d1):.6g} violates positivity")
            break
    for z in points:
        d2 = profile.hsecond(z)
        if d2 < -max(tol, 1e-7) or (strict and d2 <= 0):
            problems.append(f"h''({float(z):.6g}) = {float(d2):.6g} violates convexity")
            break
    if not profile.hprime1 > 0:
        problems.append(f"h'(1) = {profile.hprime1} must be positive")
    return problems


# --------------------------------------------------------------------------
# Named profiles and config files


def quadratic(scale=1, name: str | None = None) -> PolynomialProfile:
    """``h(z) = scale * (z + 1)**2 / 2``, so ``h'(1) = 2 * scale``."""
    scale = _as_fraction(scale)
    return PolynomialProfile([0, 0, scale / 2], name=name or ("quadratic" if scale == 1 else f"quadratic*{scale}"))


NAMED_PROFILES: dict[str, Callable[[], TwistProfile]] = {
    "quadratic": lambda: quadratic(1),
    "quadratic4": lambda: quadratic(2, name="quadratic4"),
    "cubic": lambda: PolynomialProfile([0, 0, 0, Fraction(1, 6)], name="cubic"),
}


def profile_from_config(config: dict, name: str = "config") -> TwistProfile:
    kind = config.get("kind")
    if kind in ("exact", "polynomial", "exact-polynomial"):
        coefficients = config.get("coefficients")
        if not coefficients:
            raise ProfileError("polynomial profile needs 'coefficients' (powers of z+1)")
        profile: TwistProfile = PolynomialProfile(coefficients, name=config.get("name", name))
    elif kind in ("numeric", "table"):
        table = config.get("table")
        if not table:
            raise ProfileError("numeric profile needs a 'table' of [z, h] rows")
        zs, hs = zip(*table)
        profile = NumericProfile.from_table(zs, hs, config.get("hprime1"), name=config.get("name", name))
    elif kind == "disc":
        twist = parse_twist(config["f"])
        if config.get("truncation") is not None:
            twist = twist.truncated(int(config["truncation"]))
        profile = disc_to_sphere(twist)
    else:
        raise ProfileError(f"unknown profile kind {kind!r}")
    declared = config.get("hprime1")
    if declared is not None and abs(float(profile.hprime1) - float(_as_fraction(declared) if isinstance(declared, str) else declared)) > NUMERIC_CMP_TOL:
        raise ProfileError(f"declared hprime1={declared} but profile has h'(1)={profile.hprime1}")
    return profile


def load_profile(source: str | Path) -> TwistProfile:
    """Load a named built-in profile or a JSON profile config file."""
    key = str(source)
    if key in NAMED_PROFILES:
        return NAMED_PROFILES[key]()
    path = Path(source)
    if not path.exists():
        raise ProfileError(f"no built-in profile or file named {key!r}")
    try:
        config = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProfileError(f"{path}: {exc}") from exc
    return profile_from_config(config, name=path.stem)


# --------------------------------------------------------------------------
# Disc twists


@dataclass(frozen=True, eq=False)
class DiscTwist:
    """Radial twist ``(r, theta) -> (r, theta + 2 pi f(r))`` of the unit disc.

    With ``truncation = i`` the twist uses ``f_i(r) = f(max(r, 1/i))``, which
    agrees with ``f`` on ``[1/i, 1]`` and increases with ``i``.
    """

    f: Callable[[float], float]
    truncation: int | None = None
    label: str = "f"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.truncation is not None and self.truncation < 1:
            raise ProfileError("truncation index must be >= 1")

    @property
    def cutoff(self) -> float:
        return 0.0 if self.truncation is None else 1.0 / self.truncation

    def value(self, r: float) -> float:
        return float(self.f(max(r, self.cutoff))) if self.truncation else float(self.f(r))

    def truncated(self, i: int) -> "DiscTwist":
        return DiscTwist(self.f, i, f"{self.label}|i={i}")

    def _points(self, lo: float, hi: float):
        c = self.cutoff
        return [c] if lo < c < hi else None

    def hamiltonian(self, r: float) -> float:
        """``F(r) = int_r^1 s f(s) ds``."""
        r = float(r)
        cached = self._cache.get(r)
        if cached is not None:
            return cached
        c = self.cutoff
        if self.truncation and r < c:
            # f_i is constant on [0, 1/i]
            inner = self.value(0.0) * (c * c - r * r) / 2
            value = inner + self.hamiltonian(c)
        else:
            value, _ = integrate.quad(lambda s: s * self.value(s), r, 1.0, epsabs=0.0,
                                      epsrel=1e-13, limit=400)
        self._cache[r] = value
        return value

    def is_monotone(self, samples: int = 400) -> bool:
        rs = np.linspace(1.0 / samples, 1.0, samples)
        vals = np.array([self.value(r) for r in rs])
        return bool(np.all(np.diff(vals) <= 1e-12 * np.maximum(1.0, np.abs(vals[:-1]))))


def _disc_calabi_on(twist: DiscTwist, lo: float) -> float:
    value, _ = integrate.quad(lambda r: twist.hamiltonian(r) * r, lo, 1.0,
                              points=twist._points(lo, 1.0), epsabs=0.0, epsrel=1e-12, limit=400)
    return value


def disc_calabi(twist: DiscTwist) -> float:
    """``Cal(phi_f) = int_0^1 int_r^1 s f(s) ds r dr`` by nested quadrature."""
    if twist.truncation is None:
        cutoffs = [1e-2, 1e-4, 1e-6, 1e-8]
        with warnings.catch_warnings():
            # a divergent integrand is the expected outcome of this probe
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            partial = [_disc_calabi_on(twist, c) for c in cutoffs]
        steps = np.diff(partial)
        if steps[-1] > 1e-9 * max(1.0, abs(partial[-1])) and steps[-1] > 0.5 * steps[-2]:
            raise DivergentCalabi(f"Calabi integral of {twist.label} diverges near r = 0", partial)
    return _disc_calabi_on(twist, 0.0)


def disc_to_sphere(twist: DiscTwist) -> NumericProfile:
    """Sphere profile of a disc twist: ``h(z) = 2 F(sqrt(1 - z))`` on ``[0, 1]``, zero below.

    Raises :class:`DivergentCalabi` for an untruncated twist whose Calabi
    integral diverges.
    """
    hprime1 = twist.value(0.0) if twist.truncation else float(twist.f(0.0)) if _finite_at_zero(twist) else math.inf
    if not math.isfinite(hprime1):
        disc_calabi(twist)  # raises when divergent

    def h(z: float) -> float:
        return 0.0 if z <= 0.0 else 2.0 * twist.hamiltonian(math.sqrt(max(0.0, 1.0 - z)))

    def hprime(z: float) -> float:
        return 0.0 if z <= 0.0 else twist.value(math.sqrt(max(0.0, 1.0 - z)))

    breaks = [0.0]
    if twist.truncation:
        breaks.append(1.0 - twist.cutoff ** 2)
    return NumericProfile(h, hprime, hprime1, h1=2.0 * twist.hamiltonian(0.0) if math.isfinite(hprime1) else None,
                          breakpoints=breaks, name=f"disc[{twist.label}]")


def _finite_at_zero(twist: DiscTwist) -> bool:
    try:
        with np.errstate(all="ignore"):
            value = float(twist.f(0.0))
    except (ZeroDivisionError, OverflowError, ValueError):
        return False
    return math.isfinite(value)


def power_twist(exponent: float) -> DiscTwist:
    return DiscTwist(lambda r, e=float(exponent): r ** e if r > 0 else math.inf, label=f"r^{exponent:g}")


def linear_twist(amplitude: float) -> DiscTwist:
    return DiscTwist(lambda r, a=float(amplitude): a * (1.0 - r), label=f"{amplitude:g}(1-r)")


def zero_twist() -> DiscTwist:
    return DiscTwist(lambda r: 0.0, label="0")


def parse_twist(spec: str) -> DiscTwist:
    """Parse ``power:<e>``, ``linear:<a>`` or ``zero``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "power":
            return power_twist(float(arg))
        if kind == "linear":
            return linear_twist(float(arg) if arg else 2.0)
        if kind == "zero":
            return zero_twist()
    except ValueError as exc:
        raise ProfileError(f"bad twist spec {spec!r}") from exc
    raise ProfileError(f"unknown twist family {spec!r}; use power:<e>, linear:<a> or zero")
