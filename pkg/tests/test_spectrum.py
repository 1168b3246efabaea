from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from oracles import convex_paths, quadratic_action_oracle
from pfh_twist.complex import enumerate_generators, grading_window
from pfh_twist.profile import NAMED_PROFILES, quadratic
from pfh_twist.spectral import c_dk_exact
from pfh_twist.spectrum import Violation, action_in_spectrum, base_values, spec_d, spectrality_check

QUAD = quadratic()


def test_degree_one_window():
    w = spec_d(QUAD, 1, (F(-1, 10), F(11, 10)))
    assert w.values == (F(0), F(3, 4), F(1))
    assert w.min_gap == F(1, 4)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_base_values_match_vertex_enumeration(d):
    expected = sorted({quadratic_action_oracle(v) for v in convex_paths(d, 2)})
    assert base_values(d, QUAD) == expected


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(-5, 5))
def test_integer_shift_invariance(d, n):
    a = spec_d(QUAD, d, (F(-2), F(2)))
    b = spec_d(QUAD, d, (F(-2 + n), F(2 + n)))
    assert tuple(v + n for v in a.values) == b.values


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_spectral_values_are_spectral(d):
    triples = [(d, k, c_dk_exact(d, k, QUAD)) for k in range(-3 * d, 3 * d + 1) if (k - d) % 2 == 0]
    assert spectrality_check(triples, QUAD)


def test_perturbed_value_is_flagged():
    c = c_dk_exact(3, -3, QUAD)
    with pytest.raises(Violation) as exc:
        spectrality_check([(3, -3, c), (3, -1, c + F(1, 1000))], QUAD)
    assert exc.value.offending == ((3, -1),)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_every_generator_action_is_spectral(d):
    for k in grading_window(d):
        for a in set(enumerate_generators(d, k, QUAD).actions):
            assert action_in_spectrum(a, d, QUAD)


def test_numeric_profile_tolerance():
    cubic = NAMED_PROFILES["cubic"]()
    c = c_dk_exact(2, 0, cubic)
    assert action_in_spectrum(c, 2, cubic, tol=1e-8)
    assert not action_in_spectrum(c + 1e-3, 2, cubic, tol=1e-8)


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        spec_d(QUAD, 1, (1, 0))
