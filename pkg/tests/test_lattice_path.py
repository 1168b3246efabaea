from fractions import Fraction

import pytest
from hypothesis import given, settings

from pfh_twist.lattice_path import (E, H, Edge, InvalidOrbitSet, LatticePath, Orbit, PathSyntaxError,
                                    from_orbit_set, make_path, to_orbit_set, validate)
from pfh_twist.profile import quadratic
from strategies import paths


def test_basic_quantities():
    p = make_path(-2, [(1, 0, 1), (3, 2, 1, H), (1, 2, 2)])
    assert p.degree == 6 and p.rise == 6 and p.end_y == 4 and p.h_count == 1
    assert p.total_multiplicity == 4
    assert p.vertices() == [(0, -2), (1, -2), (4, 0), (6, 4)]
    assert p.height(2) == Fraction(-4, 3)
    assert p.column_ceilings() == [-2, -2, -1, 0, 0, 2, 4]


def test_parse_normalises_to_primitive():
    p = LatticePath.parse("1; (2,2)x1:H; (1,2)")
    assert p.edges == (Edge(1, 1, 2, H), Edge(1, 2, 1, E))
    assert str(p) == "1; (1,1)x2:H; (1,2)x1:E"


@pytest.mark.parametrize("text", ["", "x; (1,1)x1", "0; (1,1)x0", "0; (0,1)x1", "0", "0; (1,1)x1:Q"])
def test_parse_errors(text):
    with pytest.raises(PathSyntaxError):
        LatticePath.parse(text)


@settings(max_examples=200, deadline=None)
@given(paths())
def test_serialization_round_trip(p):
    assert LatticePath.parse(str(p)) == p


@settings(max_examples=200, deadline=None)
@given(paths())
def test_generated_paths_are_valid(p):
    assert validate(p, quadratic()) == []


def test_validate_reports_every_problem():
    quad = quadratic()
    assert validate(LatticePath(0, ()), quad)
    bad = LatticePath(0, (Edge(1, 1), Edge(1, 0), Edge(1, 3), Edge(1, 2, 1, H)))
    problems = validate(bad, quad)
    assert any("increasing" in s for s in problems)
    assert any("exceeds" in s for s in problems)
    assert any("H label" in s for s in problems)


def test_shift_and_shape():
    p = make_path(3, [(1, 1, 2, H)])
    assert p.shift(-5).start_y == -2 and p.shift(-5).edges == p.edges
    assert p.shape().start_y == 0 and p.unlabeled().h_count == 0


def test_orbit_set_round_trip():
    orbits = [(Orbit("gamma-"), 2), (Orbit.parse("e_1/2"), 1), (Orbit.parse("h_1/2"), 1), (Orbit("gamma+"), 1)]
    p = from_orbit_set(orbits, -1, quadratic())
    assert str(p) == "-1; (1,0)x2:E; (2,1)x2:H; (1,2)x1:E"
    back = to_orbit_set(p, 2)
    assert from_orbit_set(back, -1, 2) == p


@pytest.mark.parametrize("orbits", [
    [(Orbit.parse("h_1/2"), 2)],
    [(Orbit.parse("e_3"), 1)],
    [],
    [(Orbit.parse("h_1"), 1), (Orbit.parse("h_1"), 1)],
])
def test_invalid_orbit_sets(orbits):
    with pytest.raises(InvalidOrbitSet):
        from_orbit_set(orbits, 0, 2)
