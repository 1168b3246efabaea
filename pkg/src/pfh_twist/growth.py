"""Growth of ``c_d / d`` for truncations of a (possibly infinite) disc twist.

For each truncation ``f_i`` the bracket on ``c_d = c_{d,-d}`` pins ``c_d/d``
near ``Cal(f_i)``.  Finite-energy maps have ``c_d/d`` bounded, whereas an
infinite twist dominates every ``f_i``, so its slopes exceed every
``Cal(f_i)``; when those diverge the growth is superlinear.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .parallel import pmap
from .profile import DiscTwist, DivergentCalabi, disc_calabi, disc_to_sphere
from .spectral import c_dk_bracket


@dataclass(frozen=True)
class GrowthPoint:
    d: int
    lo: float  # bounds on c_d
    hi: float

    @property
    def slope_lo(self) -> float:
        return self.lo / self.d

    @property
    def slope_hi(self) -> float:
        return self.hi / self.d

    @property
    def estimate_bounds(self) -> tuple[float, float]:
        """Bounds on ``c_d/d + 1/(2(d+1))``, which tends to the Calabi invariant."""
        shift = 1.0 / (2 * (self.d + 1))
        return self.slope_lo + shift, self.slope_hi + shift


@dataclass(frozen=True)
class GrowthReport:
    truncation: int | None  # None: untruncated
    calabi: float
    points: tuple[GrowthPoint, ...]

    @property
    def slope(self) -> float:
        """``c_d/d`` midpoint at the largest degree."""
        last = self.points[-1]
        return (last.slope_lo + last.slope_hi) / 2


@dataclass(frozen=True)
class Divergence:
    divergent: bool
    partial_values: tuple = field(default=())


def check_divergence(f: DiscTwist) -> Divergence:
    """Whether the untruncated Calabi integral diverges (numerically)."""
    try:
        disc_calabi(DiscTwist(f.f, None, f.label))
    except DivergentCalabi as exc:
        return Divergence(True, exc.partial_values)
    return Divergence(False)


def _truncate(f: DiscTwist, i: int | None) -> DiscTwist:
    return DiscTwist(f.f, None, f.label) if i is None else f.truncated(i)


def _cell(f: DiscTwist, i: int | None, d: int) -> GrowthPoint:
    profile = disc_to_sphere(_truncate(f, i))
    if float(profile.hprime1) == 0.0:
        return GrowthPoint(d, 0.0, 0.0)  # zero twist: every invariant vanishes
    b = c_dk_bracket(d, -d, profile)
    return GrowthPoint(d, float(b.lo), float(b.hi))


def growth_report(f: DiscTwist, i_list, d_list) -> list[GrowthReport]:
    """One report per truncation index; ``i_list`` is processed in increasing order.

    ``None`` in ``i_list`` stands for the untruncated twist and sorts last;
    it needs ``f(0)`` finite.  Every profile must have integer ``h'(1)``.

    Lower bounds are propagated upward in ``i``: ``f_i <= f_{i'}`` for
    ``i < i'`` makes ``c_d`` monotone in ``i``, so a witness for ``f_i``
    also bounds ``c_d(f_{i'})`` from below.
    """
    i_list = sorted(i_list, key=lambda i: (i is None, i or 0))
    d_list = sorted(d_list)
    cells = pmap(lambda cell: _cell(f, *cell), [(i, d) for i in i_list for d in d_list])
    reports, best_lo = [], {}
    for n, i in enumerate(i_list):
        points = []
        for m, d in enumerate(d_list):
            cell = cells[n * len(d_list) + m]
            lo = max(cell.lo, best_lo.get(d, cell.lo))
            best_lo[d] = lo
            points.append(GrowthPoint(d, lo, cell.hi))
        reports.append(GrowthReport(i, disc_calabi(_truncate(f, i)), tuple(points)))
    return reports
