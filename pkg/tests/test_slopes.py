from fractions import Fraction
from itertools import combinations
from math import gcd, log2

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import distinct_pair, slopes
from curvex.errors import ParseError, SemanticError
from curvex.slopes import (
    INFINITY,
    ZERO,
    ContinuedFraction,
    Slope,
    bfs_distances,
    continued_fraction,
    farey_distance,
    farey_distance_bfs,
    farey_geodesic,
    intersection_number,
    is_edge,
    ladder_vertices,
    oracle_row,
    pivot_sequence,
    slopes_in_unit_interval,
)


def S(t):
    return Slope.parse(t)


# -- canonical form ------------------------------------------------------------

def test_canonical_form_enforced():
    for bad in [(2, 4), (1, -2), (-1, 0), (0, 0)]:
        with pytest.raises(SemanticError):
            Slope(*bad)
    assert Slope.of(-2, -4) == Slope(1, 2)
    assert Slope.of(-3, 0) == INFINITY


@pytest.mark.parametrize("text", ["1/0", "0/1", "-7/5", "13/8", "4"])
def test_parse_print_round_trip(text):
    s = S(text)
    assert S(str(s)) == s


@pytest.mark.parametrize("text", ["2/4", "1/-2", "x", "3/0", ""])
def test_parse_rejects(text):
    with pytest.raises(ParseError):
        S(text)


# -- intersection and edges ------------------------------------------------------

@pytest.mark.parametrize("a,b,n", [("1/0", "7/5", 5), ("0/1", "1/1", 1), ("2/5", "3/7", 1)])
def test_intersection_examples(a, b, n):
    assert intersection_number(S(a), S(b)) == n


def _lattice_crossings(a: Slope, b: Slope) -> int:
    # straight torus curves of slopes a, b meet |det| times; count the
    # lattice points of the half-open parallelogram spanned by the vectors
    u, v = (a.q, a.p), (b.q, b.p)
    det = u[0] * v[1] - u[1] * v[0]
    if det == 0:
        return 0
    xs = [0, u[0], v[0], u[0] + v[0]]
    ys = [0, u[1], v[1], u[1] + v[1]]
    count = 0
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            s = Fraction(x * v[1] - y * v[0], det)
            t = Fraction(u[0] * y - u[1] * x, det)
            if 0 <= s < 1 and 0 <= t < 1:
                count += 1
    return count


@given(distinct_pair(max_q=7))
def test_intersection_matches_lattice_count(pair):
    a, b = pair
    assert intersection_number(a, b) == _lattice_crossings(a, b)


@pytest.mark.parametrize("a,b,e", [("0/1", "1/0", True), ("0/1", "2/1", False), ("1/2", "1/3", True)])
def test_is_edge_examples(a, b, e):
    assert is_edge(S(a), S(b)) is e


@given(slopes(), slopes())
def test_intersection_symmetric_and_zero_on_diagonal(a, b):
    assert intersection_number(a, b) == intersection_number(b, a)
    assert (intersection_number(a, b) == 0) == (a == b)


# -- continued fractions ---------------------------------------------------------

def test_continued_fraction_examples():
    assert str(continued_fraction(S("7/5"))) == "[1;2,2]"
    assert str(continued_fraction(S("3/1"))) == "[3]"
    assert continued_fraction(S("-2/7")).value() == S("-2/7")
    with pytest.raises(SemanticError):
        continued_fraction(INFINITY)


@given(slopes(allow_inf=False))
def test_continued_fraction_canonical_round_trip(s):
    cf = continued_fraction(s)
    assert cf.value() == s
    if cf.partial_quotients:
        assert cf.partial_quotients[-1] >= 2
    assert ContinuedFraction.parse(str(cf)) == cf


def test_continued_fraction_rejects_noncanonical():
    with pytest.raises(SemanticError):
        ContinuedFraction(1, (2, 1))
    with pytest.raises(ParseError):
        ContinuedFraction.parse("[1;2,1]")


# -- pivot sequences ---------------------------------------------------------------

def _unit_triangles(max_q: int) -> list[frozenset]:
    # Farey triangles inside [0, 1] with all denominators <= max_q
    out, stack = [], [((0, 1), (1, 1))]
    while stack:
        l, r = stack.pop()
        m = (l[0] + r[0], l[1] + r[1])
        if m[1] > max_q:
            continue
        out.append(frozenset(Slope.of(*v) for v in (l, r, m)))
        stack += [(l, m), (m, r)]
    return out


def _separates(u: Slope, v: Slope, a: Fraction, b: Fraction) -> bool:
    lo, hi = sorted((u.to_fraction(), v.to_fraction()))
    ins = [lo < x < hi for x in (a, b)]
    out = [x < lo or x > hi for x in (a, b)]
    return (ins[0] and out[1]) or (ins[1] and out[0])


def _crossed_oracle(a: Slope, b: Slope) -> set:
    qa, qb = a.to_fraction(), b.to_fraction()
    bound = max(a.q, b.q)
    tris = _unit_triangles(bound)
    return {t for t in tris if any(_separates(u, v, qa, qb) for u, v in combinations(sorted(t), 2))}


def test_pivot_sequence_examples():
    assert len(pivot_sequence(ZERO, INFINITY)) == 0
    assert {S("1/2"), S("1/3")} <= pivot_sequence(ZERO, S("2/5")).vertices()
    conv = set(continued_fraction(S("5/8")).convergents())
    assert conv <= pivot_sequence(INFINITY, S("5/8")).vertices()
    with pytest.raises(SemanticError):
        pivot_sequence(ZERO, ZERO)


def test_pivot_sequence_matches_crossing_enumeration():
    for a, b in combinations(slopes_in_unit_interval(9)[:-1], 2):
        got = {frozenset(t) for t in pivot_sequence(a, b).triangles}
        assert got == _crossed_oracle(a, b), (a, b)


@given(distinct_pair(max_q=40))
def test_pivot_sequence_chain(pair):
    a, b = pair
    tris = pivot_sequence(a, b).triangles
    if not tris:
        assert is_edge(a, b)
        return
    assert a in tris[0] and b in tris[-1]
    for t in tris:
        assert all(is_edge(u, v) for u, v in combinations(t, 2))
    for s, t in zip(tris, tris[1:]):
        assert len(set(s) & set(t)) == 2


# -- distances ---------------------------------------------------------------------

def test_distance_examples():
    assert farey_distance(ZERO, INFINITY) == 1
    assert farey_distance(S("5/8"), S("5/8")) == 0
    h = 64
    d = bfs_distances(INFINITY, [S("5/8")], h)[0]
    assert d == bfs_distances(INFINITY, [S("5/8")], 2 * h)[0]
    assert farey_distance(INFINITY, S("5/8")) == d == 3


@given(distinct_pair(max_q=30))
def test_distance_matches_bfs_oracle(pair):
    a, b = pair
    assert farey_distance(a, b) == farey_distance_bfs(a, b)


def test_distance_matches_bfs_small_sweep():
    ss = slopes_in_unit_interval(20)
    for i, a in enumerate(ss[:-1]):
        rest = ss[i + 1:]
        assert [farey_distance(a, b) for b in rest] == oracle_row(a, rest, 160)


@given(slopes(), slopes(), slopes())
def test_metric_axioms(a, b, c):
    assert farey_distance(a, b) == farey_distance(b, a)
    assert (farey_distance(a, b) == 0) == (a == b)
    assert farey_distance(a, c) <= farey_distance(a, b) + farey_distance(b, c)


@given(slopes(), slopes())
def test_distance_one_iff_edge(a, b):
    assert (farey_distance(a, b) == 1) == (intersection_number(a, b) == 1)


def test_log_intersection_bound_on_sweep():
    # coarse bound d <= 2 log2 i + 2 over all pairs with denominators <= 30
    ss = slopes_in_unit_interval(30)
    for a, b in combinations(ss, 2):
        i = intersection_number(a, b)
        assert farey_distance(a, b) <= 2 * log2(i) + 2


@given(distinct_pair(max_q=20), st.integers(40, 120), st.integers(40, 120))
def test_distance_on_huge_entries(pair, k1, k2):
    # a huge-entry pair with known distance: move a small pair by a big matrix
    from curvex.action import MappingClass, act_slope

    g = MappingClass(1, 2 ** k1, 0, 1) @ MappingClass(1, 0, 3 ** k2, 1) @ MappingClass(2, 1, 1, 1)
    a, b = pair
    ga, gb = act_slope(g, a), act_slope(g, b)
    assert max(abs(ga.p), abs(gb.p), ga.q, gb.q) > 2 ** 40
    assert farey_distance(ga, gb) == farey_distance(a, b) == farey_distance_bfs(a, b)


# -- geodesics --------------------------------------------------------------------

def test_geodesic_examples():
    assert farey_geodesic(ZERO, INFINITY) == [ZERO, INFINITY]
    assert farey_geodesic(S("3/7"), S("3/7")) == [S("3/7")]
    assert len(farey_geodesic(INFINITY, S("5/8"))) - 1 == farey_distance(INFINITY, S("5/8"))


@given(slopes(max_q=200), slopes(max_q=200))
def test_geodesic_is_shortest_path(a, b):
    path = farey_geodesic(a, b)
    assert path[0] == a and path[-1] == b
    assert len(path) - 1 == farey_distance(a, b)
    assert all(is_edge(u, v) for u, v in zip(path, path[1:]))


@given(distinct_pair(max_q=200))
def test_ladder_contains_geodesic_endpoints(pair):
    a, b = pair
    lv = ladder_vertices(a, b)
    assert a in lv and b in lv
    assert set(lv) <= pivot_sequence(a, b).vertices() | {a, b}
