"""Order-``d`` action spectrum of the radial twist Hamiltonian.

Periodic orbits of period ``q`` sit on the circles ``h'(z) = p/q`` plus the
two poles.  Summing their actions over collections of total period ``d``
gives the base values; capping ambiguity adds every integer.  The base
values are exactly the actions of all-``E`` path shapes at height 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .complex import enumerate_shapes
from .profile import NUMERIC_CMP_TOL, TwistProfile


class Violation(AssertionError):
    def __init__(self, message: str, offending):
        super().__init__(message)
        self.offending = tuple(offending)


@dataclass(frozen=True)
class SpectrumWindow:
    d: int
    lo: object
    hi: object
    values: tuple  # sorted

    def __contains__(self, value) -> bool:
        return self.contains(value)

    def contains(self, value, tol: float = 1e-8) -> bool:
        if isinstance(value, (Fraction, int)) and all(isinstance(v, Fraction) for v in self.values):
            return Fraction(value) in set(self.values)
        x = float(value)
        return any(abs(x - float(v)) <= tol for v in self.values)

    @property
    def min_gap(self):
        """Smallest distance between consecutive values (``None`` for fewer than two)."""
        if len(self.values) < 2:
            return None
        return min(b - a for a, b in zip(self.values, self.values[1:]))


def base_values(d: int, profile: TwistProfile) -> list:
    """Distinct values of ``sum of orbit actions`` over collections of total period ``d``."""
    raw = [shape.action0 for shape in enumerate_shapes(d, profile, labeled=False)]
    return _dedupe(raw, profile.is_exact)


def _dedupe(values, exact: bool) -> list:
    values = sorted(values)
    if exact:
        return sorted(set(values))
    out = []
    for v in values:
        if not out or abs(v - out[-1]) > NUMERIC_CMP_TOL:
            out.append(v)
    return out


def spec_d(profile: TwistProfile, d: int, interval) -> SpectrumWindow:
    """``Spec_d`` intersected with the closed interval ``[a, b]``."""
    a, b = interval
    if a > b:
        raise ValueError(f"empty interval [{a}, {b}]")
    out = []
    for v in base_values(d, profile):
        for n in range(math.ceil(a - v), math.floor(b - v) + 1):
            out.append(v + n)
    return SpectrumWindow(d, a, b, tuple(_dedupe(out, profile.is_exact)))


def spectrality_check(table, profile: TwistProfile, tol: float = 1e-8):
    """Every exact value in ``table`` must lie in ``Spec_d``; raises :class:`Violation` otherwise.

    ``table`` is a :class:`~pfh_twist.spectral.SpectralTable` or an iterable
    of ``(d, k, value)`` triples.
    """
    triples = [(r.d, r.k, r.value) for r in table.rows if r.value is not None] if hasattr(table, "rows") \
        else list(table)
    bad = []
    for d, k, value in triples:
        if not action_in_spectrum(value, d, profile, tol):
            bad.append((d, k))
    if bad:
        raise Violation(f"values outside the order-d spectrum at {bad}", bad)
    return True


def action_in_spectrum(value, d: int, profile: TwistProfile, tol: float = 1e-8) -> bool:
    """Whether ``value`` is a base value plus an integer."""
    window = spec_d(profile, d, (math.floor(value) - 1, math.ceil(value) + 1))
    return window.contains(value, tol)
