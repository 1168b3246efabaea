from fractions import Fraction as F

import pytest

from oracles import c_dk_oracle_quadratic
from pfh_twist.complex import min_max
from pfh_twist.profile import NAMED_PROFILES, quadratic
from pfh_twist.spectral import (EmptyGrading, c_dk_bracket, c_dk_exact, calabi_estimate, monotonicity_check,
                                raise_to_grading, shift_law_check, spectral_table, step1_lattice_path,
                                upper_bound)
from pfh_twist.index import index

QUAD = quadratic()

# frozen from c_dk_oracle_quadratic (vertex enumeration + point-count index)
FROZEN = {
    1: {-5: F(-1), -3: F(-1, 4), -1: F(0), 1: F(3, 4), 3: F(1), 5: F(7, 4)},
    2: {-8: F(-1, 2), -6: F(-1, 4), -4: F(0), -2: F(1, 2), 0: F(3, 4), 2: F(1), 4: F(3, 2), 6: F(7, 4),
        8: F(2)},
    3: {-11: F(-1, 4), -9: F(-1, 8), -7: F(1, 4), -5: F(1, 2), -3: F(3, 4), -1: F(7, 8), 1: F(5, 4),
        3: F(3, 2), 5: F(7, 4), 7: F(15, 8), 9: F(9, 4), 11: F(5, 2)},
}
C_MINUS_D = [F(0), F(1, 2), F(3, 4), F(1), F(11, 8), F(13, 8)]


@pytest.mark.parametrize("d", [1, 2, 3])
def test_frozen_table(d):
    for k, v in FROZEN[d].items():
        assert c_dk_exact(d, k, QUAD) == v


def test_frozen_table_reproduced_by_oracle():
    for k, v in FROZEN[2].items():
        assert c_dk_oracle_quadratic(2, k) == v


def test_c_minus_d():
    assert [c_dk_exact(d, -d, QUAD) for d in range(1, 7)] == C_MINUS_D


@pytest.mark.parametrize("d", range(1, 9))
def test_shift_and_monotonicity(d):
    ks = range(-3 * d, 3 * d + 1)
    assert shift_law_check(d, QUAD, ks)
    assert monotonicity_check(d, QUAD, ks)


@pytest.mark.parametrize("d", range(1, 5))
def test_brute_equals_min_max(d):
    for k in range(-2 * d - 2, 2 * d + 3):
        if (k - d) % 2 == 0:
            assert c_dk_exact(d, k, QUAD) == min_max(d, k, QUAD)


@pytest.mark.parametrize("name", ["quadratic4", "cubic"])
def test_laws_other_profiles(name):
    prof = NAMED_PROFILES[name]()
    for d in (1, 2, 3):
        ks = range(-d - 2, d + 3)
        assert shift_law_check(d, prof, ks) and monotonicity_check(d, prof, ks)
        for k in ks:
            if (k - d) % 2 == 0:
                assert abs(float(c_dk_exact(d, k, prof)) - float(min_max(d, k, prof))) < 1e-9


def test_wrong_parity_is_empty():
    with pytest.raises(EmptyGrading):
        c_dk_exact(2, 1, QUAD)
    with pytest.raises(EmptyGrading):
        raise_to_grading(step1_lattice_path(3, QUAD), 0, QUAD)


def test_degree_above_cap_rejected():
    with pytest.raises(ValueError):
        c_dk_exact(11, -11, QUAD)


@pytest.mark.parametrize("d", range(1, 9))
def test_bracket_contains_exact_value(d):
    for k in range(-2 * d - 2, 2 * d + 3):
        if (k - d) % 2:
            continue
        b = c_dk_bracket(d, k, QUAD)
        assert index(b.witness) == k
        assert b.lo <= c_dk_exact(d, k, QUAD) <= b.hi


def test_upper_bound_formula():
    assert upper_bound(4, -4, QUAD) == 4 * F(4, 3) / 4
    assert upper_bound(3, 1, QUAD) == F(1) + F(4, 8)


def test_bracket_at_degree_200():
    b = c_dk_bracket(200, -200, QUAD)
    lo, hi = calabi_estimate(b.lo, 200, -200), calabi_estimate(b.hi, 200, -200)
    assert hi - lo < 0.05
    assert lo <= F(1, 3) <= hi


def test_estimate_error_decreases():
    err = {d: abs(calabi_estimate(c_dk_exact(d, -d, QUAD), d, -d) - F(1, 3)) for d in (2, 10)}
    assert err[2] == F(1, 12)
    assert err[10] < err[2]


def test_table_methods_agree():
    brute = spectral_table(QUAD, [1, 2, 3])
    mm = spectral_table(QUAD, [1, 2, 3], method="minmax")
    assert brute.values() == mm.values()
    assert spectral_table(QUAD, [5], method="bracket").consistent()
