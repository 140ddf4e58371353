import random
from math import isqrt

import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvex.action import MappingClass, act_slope
from curvex.errors import ParseError, SemanticError
from curvex.markings import (
    GAP_CONSTANT,
    PATH_FACTOR,
    STANDARD,
    WHOLE_SURFACE,
    Marking,
    Swap,
    Twist,
    act_marking,
    elementary_moves,
    marking_ball,
    marking_corpus,
    marking_distance_bfs,
    max_projection_gap,
    mm_path,
    parse_moves,
    random_word,
)
from curvex.slopes import INFINITY, ZERO, Slope, farey_distance


def M(text):
    return Marking.parse(text)


def _vector_moves(m: Marking) -> set:
    # oracle: a twist about b adds or subtracts the vector of b to that of t
    (bp, bq), (tp, tq) = (m.base.p, m.base.q), (m.transversal.p, m.transversal.q)
    out = {Marking(m.transversal, m.base)}
    for e in (1, -1):
        out.add(Marking(m.base, Slope.of(tp + e * bp, tq + e * bq)))
    return out


def _vector_ball(center: Marking, radius: int) -> dict:
    dist, frontier = {center: 0}, [center]
    for r in range(1, radius + 1):
        nxt = []
        for m in frontier:
            for w in _vector_moves(m):
                if w not in dist:
                    dist[w] = r
                    nxt.append(w)
        frontier = nxt
    return dist


@st.composite
def markings(draw):
    word = draw(st.lists(st.tuples(st.booleans(), st.integers(-4, 4)), max_size=6))
    g = MappingClass(1, 0, 0, 1)
    for swap, k in word:
        g = g @ (MappingClass(0, -1, 1, 0) if swap else MappingClass(1, k, 0, 1))
    return Marking.from_matrix(g.entries)


# -- markings and moves ----------------------------------------------------------

def test_marking_validation_and_parse():
    assert str(M("1/0:0/1")) == "1/0:0/1"
    with pytest.raises(ParseError):
        M("1/0:0/1:2/1")
    with pytest.raises(ParseError):
        M("1/0:3/2")
    with pytest.raises(SemanticError):
        Marking(ZERO, Slope(2, 1))


def test_elementary_move_examples():
    moves = elementary_moves(STANDARD)
    assert M("0/1:1/0") in moves
    assert M("1/0:1/1") in moves
    assert len(moves) == 3


@given(markings())
def test_elementary_moves_match_vector_oracle(m):
    assert elementary_moves(m) == _vector_moves(m)


def test_ball_of_radius_three_matches_vector_bfs():
    ball = marking_ball(STANDARD, 3)
    oracle = _vector_ball(STANDARD, 3)
    assert ball == oracle
    # 1 + 3 + 6 + 12 words, less two coincidences from (ST)^3 = 1:
    # STS = T^-1 S T^-1 and S T^-1 S = T S T
    assert len(ball) == 20
    for m, d in ball.items():
        assert marking_distance_bfs(STANDARD, m) == d


def test_distance_examples():
    assert marking_distance_bfs(STANDARD, STANDARD) == 0
    assert marking_distance_bfs(STANDARD, M("0/1:1/0")) == 1
    assert marking_distance_bfs(STANDARD, M("1/0:3/1")) == 3
    far = Marking.from_matrix((MappingClass(2, 1, 1, 1) ** 12).entries)
    assert marking_distance_bfs(STANDARD, far, cap=5) is None


# -- paths -------------------------------------------------------------------------

def test_path_examples():
    assert len(mm_path(STANDARD, STANDARD)) == 0
    assert mm_path(STANDARD, M("1/0:1/1")).moves == (Twist(1),)
    end = M("5/8:2/3")
    p = mm_path(STANDARD, end)
    assert p.replay(STANDARD)[-1] == end
    d = marking_distance_bfs(STANDARD, end)
    assert d <= len(p) <= PATH_FACTOR * d


@given(markings(), markings())
def test_path_is_valid_and_bounded(m1, m2):
    p = mm_path(m1, m2)
    assert p.replay(m1)[-1] == m2
    d = marking_distance_bfs(m1, m2, 60)
    assert d <= len(p) <= PATH_FACTOR * max(d, 0)
    # stage twists: one count per geodesic vertex plus the final twist
    assert len(p.stage_twists) == farey_distance(m1.base, m2.base) + 1
    assert sum(p.stage_twists) + farey_distance(m1.base, m2.base) == len(p)


@given(markings(), markings())
def test_replay_steps_are_edges(m1, m2):
    walk = [m1]
    for mv in mm_path(m1, m2).moves:
        cur = walk[-1]
        if isinstance(mv, Swap):
            walk.append(cur.swapped())
        else:
            for _ in range(abs(mv.k)):
                nxt = cur.twisted(1 if mv.k > 0 else -1)
                assert nxt in _vector_moves(cur)
                cur = nxt
            walk.append(cur)
    assert walk[-1] == m2


def test_parse_moves_round_trip():
    p = mm_path(STANDARD, M("5/3:2/1"))
    assert parse_moves(str(p)) == p.moves
    with pytest.raises(ParseError):
        parse_moves("T+1 X")
    with pytest.raises(SemanticError):
        Twist(0)


# -- projection gaps -------------------------------------------------------------------

def test_gap_examples():
    assert max_projection_gap(STANDARD, STANDARD)[1] == 0
    for k in (3, 7):
        assert max_projection_gap(STANDARD, STANDARD.twisted(k)) == (INFINITY, k)
    w, d = max_projection_gap(STANDARD, M("142/33:667/155"))
    assert w == WHOLE_SURFACE or isinstance(w, Slope)


@given(markings(), markings(), st.sampled_from([MappingClass(2, 1, 1, 1), MappingClass(1, -3, 0, 1),
                                                 MappingClass(0, -1, 1, 0), MappingClass(4, 7, 1, 2)]))
def test_invariance_under_simultaneous_action(m1, m2, g):
    g1, g2 = act_marking(g, m1), act_marking(g, m2)
    assert marking_distance_bfs(g1, g2, 60) == marking_distance_bfs(m1, m2, 60)
    assert max_projection_gap(g1, g2)[1] == max_projection_gap(m1, m2)[1]


def test_gap_lower_bound_on_small_corpus():
    for m1, m2, d in marking_corpus(99, 120):
        gap = max_projection_gap(m1, m2)[1]
        assert gap * gap * GAP_CONSTANT >= d
        assert len(mm_path(m1, m2)) <= PATH_FACTOR * d


def test_corpus_is_reproducible():
    a, b = marking_corpus(7, 20), marking_corpus(7, 20)
    assert a == b
    assert all(d <= 40 for *_, d in a)
    rng = random.Random(3)
    assert random_word(rng, 3, 2).trace is not None
