import time

from hypothesis import given, settings

from oracles import index_oracle, j_oracle
from pfh_twist.index import count_j, index, index_report, pick_check
from pfh_twist.lattice_path import H, make_path
from strategies import paths

FIGURE_PATH = make_path(-2, [(1, 0, 1), (3, 2, 1, H), (1, 2, 2)])


def test_figure_counts():
    # oracle count over every lattice point of the bounding box gives (6, 5)
    assert j_oracle(FIGURE_PATH.vertices()) == (6, 5)
    rep = index_report(FIGURE_PATH)
    assert (rep.j_plus, rep.j_minus, rep.j, rep.degree, rep.h_count, rep.index) == (6, 5, 1, 6, 1, -3)


def test_figure_runtime():
    start = time.perf_counter()
    index(FIGURE_PATH)
    assert time.perf_counter() - start < 1e-3


@settings(max_examples=300, deadline=None)
@given(paths())
def test_j_matches_point_oracle(p):
    jp, jm, j = count_j(p)
    assert (jp, jm) == j_oracle(p.vertices())
    assert index(p) == index_oracle(p.vertices(), p.h_count)


@settings(max_examples=300, deadline=None)
@given(paths())
def test_shift_adds_2d_plus_2(p):
    assert index(p.shift(1)) - index(p) == 2 * p.degree + 2


@settings(max_examples=300, deadline=None)
@given(paths())
def test_pick(p):
    res = pick_check(p)
    if p.start_y < 0 < p.end_y:
        assert res.status == "crossing"
    else:
        assert res.status in ("ok", "degenerate")


def test_pick_at_height_zero_matches_simple_boundary_form():
    p = make_path(0, [(2, 1, 1), (1, 2, 1)])
    res = pick_check(p)
    assert res.ok
    M, d, w, y = p.total_multiplicity, p.degree, p.end_y, p.start_y
    assert res.twice_area == 2 * res.lattice_points - (M + d + (w - y)) - 2


def test_flat_path_is_degenerate():
    assert pick_check(make_path(0, [(1, 0, 3)])).status == "degenerate"
