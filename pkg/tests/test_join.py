import random
from fractions import Fraction
from itertools import accumulate, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from curvex.action import IDENTITY, MappingClass, act_slope, classify, twist
from curvex.boundary import OrientedCurve, PrefixStream, QuadraticIrrational
from curvex.errors import InsufficientDepth, SemanticError
from curvex.join import (
    CROSSING,
    ComponentSpace,
    ConvergenceReport,
    MixedPoint,
    ProductPoint,
    SequenceTrace,
    Term,
    Universe,
    WeightedLamination,
    act_componentwise,
    complement_gauge,
    component_gauge,
    converge_in_X,
    converge_in_Y,
    extract_limit,
    is_fixed,
    monotone_envelope,
    pr_Y,
    pr_Z,
    recurrent_patterns,
    same_limit,
    support_pattern,
    w_membership,
)
from curvex.scenarios import Ray, alternatives, random_componentwise, random_scenario, scenario_corpus
from curvex.slopes import INFINITY, ZERO, Slope, farey_distance, farey_geodesic

F = Fraction
GOLDEN = QuadraticIrrational((1,), (1,))
SILVER = QuadraticIrrational((2,), (2,))
U1 = Universe((ComponentSpace("A", "farey", INFINITY),))
U2 = Universe((ComponentSpace("A", "farey", INFINITY), ComponentSpace("B", "farey", ZERO)))
UA = Universe((ComponentSpace("A", "farey", INFINITY), ComponentSpace("B", "annulus", core=INFINITY)))


def W(*terms):
    return WeightedLamination(tuple(Term(c, F(w), p) for c, w, p in terms))


def cross(**coords):
    return WeightedLamination.single(CROSSING, ProductPoint(coords))


def rays(universe, targets, rates, length=30):
    rs = {c: Ray(universe[c], targets[c], max(rates.values()) * (length + 4)) for c in targets}
    return [ProductPoint({c: rs[c].at(rates[c] * n) for c in targets}) for n in range(1, length + 1)]


# -- types -------------------------------------------------------------------------

def test_type_invariants():
    with pytest.raises(SemanticError):
        W(("A", F(1, 2), GOLDEN))
    with pytest.raises(SemanticError):
        W(("A", F(1, 2), GOLDEN), ("A", F(1, 2), SILVER))
    with pytest.raises(SemanticError):
        Term("A", 0, GOLDEN)
    with pytest.raises(SemanticError):
        Term(CROSSING, 1, GOLDEN)
    with pytest.raises(SemanticError):
        Universe((ComponentSpace("A", "farey"), ComponentSpace("A", "annulus")))
    with pytest.raises(SemanticError):
        ComponentSpace("*", "farey")
    with pytest.raises(SemanticError):
        W(("B", 1, GOLDEN)).validate(UA)
    with pytest.raises(SemanticError):
        WeightedLamination((Term("A", F(1, 2), GOLDEN), Term(CROSSING, F(1, 2), ProductPoint({"A": ZERO})))).validate(U2)
    with pytest.raises(SemanticError):
        SequenceTrace((1, 2, 3), (0, 2, 1))
    assert SequenceTrace((1, 2)).indices == (0, 1)
    assert ProductPoint({"B": 3, "A": ZERO}) == ProductPoint((("A", ZERO), ("B", 3)))


def test_support_patterns():
    e = W(("A", F(1, 2), GOLDEN), (CROSSING, F(1, 2), ProductPoint({"B": ZERO})))
    assert support_pattern(e) == frozenset({("A", "irrational"), (CROSSING, ("B",))})
    seq = [W(("A", 1, GOLDEN)), cross(A=ZERO)] * 3 + [cross(A=ZERO)]
    pats = recurrent_patterns(seq, 2)
    assert [idx[0] for _, idx in pats] == [0, 1]


# -- projections -------------------------------------------------------------------

def test_pr_Y_cases():
    t = pr_Y(W(("A", 1, GOLDEN)), U2)
    assert t.point == GOLDEN
    assert pr_Y(W(("A", 1, OrientedCurve(Slope(3, 2), 1))), U2) == ProductPoint({"A": Slope(3, 2), "B": ZERO})
    assert pr_Y(cross(B=Slope(7, 2)), UA) == ProductPoint({"A": INFINITY, "B": 3})
    assert pr_Y(cross(B=-4), UA) == ProductPoint({"A": INFINITY, "B": -4})
    with pytest.raises(SemanticError):
        pr_Y(W(("A", F(1, 2), GOLDEN), ("B", F(1, 2), SILVER)), U2)


def test_pr_Z_cases():
    xi = W(("A", F(3, 5), GOLDEN), ("B", F(2, 5), SILVER))
    z = pr_Z(xi, ["A", "B"], U2)
    assert z == MixedPoint(xi.terms, F(0), None)
    z = pr_Z(W(("A", 1, OrientedCurve(Slope(1, 2), 1))), [], U2)
    assert z.product_mass == 1 and z.product == ProductPoint({"A": Slope(1, 2), "B": ZERO})
    z = pr_Z(W(("A", F(3, 5), GOLDEN), ("B", F(2, 5), OrientedCurve(Slope(5, 3), -1))), ["A"], U2)
    assert z.boundary[0].weight == F(3, 5) and z.product_mass == F(2, 5)
    assert z.product == ProductPoint({"B": Slope(5, 3)})
    with pytest.raises(SemanticError):
        pr_Z(xi, ["A"], U2)


def test_gauges():
    a = U2["A"]
    assert component_gauge(a, INFINITY) == 0
    assert component_gauge(a, Slope(5, 8)) == farey_distance(INFINITY, Slope(5, 8))
    assert component_gauge(UA["B"], -7) == 7
    # twisting about the basepoint keeps Farey distance at 1 but is not negligible
    far = act_slope(twist(INFINITY, 40), ZERO)
    assert component_gauge(a, far) == 1
    assert complement_gauge(a, far) == 40


# -- product-space convergence ---------------------------------------------------------

def test_converge_in_Y_examples():
    pts = [ProductPoint({"A": GOLDEN.approximant(n)}) for n in range(1, 30, 2)]
    assert converge_in_Y(pts, W(("A", 1, GOLDEN)), U1)
    pts = rays(U2, {"A": GOLDEN, "B": SILVER}, {"A": 2, "B": 1})
    assert converge_in_Y(pts, W(("A", F(2, 3), GOLDEN), ("B", F(1, 3), SILVER)), U2)
    assert not converge_in_Y(pts, W(("A", F(1, 2), GOLDEN), ("B", F(1, 2), SILVER)), U2)
    bounded = [ProductPoint({"A": p.get("A"), "B": Slope(1, 1)}) for p in pts]
    for a2 in (F(1, 3), F(1, 10)):
        assert not converge_in_Y(bounded, W(("A", 1 - a2, GOLDEN), ("B", a2, SILVER)), U2)


def test_converge_in_Y_rejects_curve_targets():
    with pytest.raises(SemanticError):
        converge_in_Y([ProductPoint({"A": ZERO})] * 4, W(("A", 1, OrientedCurve(ZERO, 1))), U1)


# -- convergence in the join ---------------------------------------------------------------

def test_converge_in_X_constant():
    xi = W(("A", F(1, 3), GOLDEN), ("B", F(2, 3), OrientedCurve(Slope(2, 5), -1)))
    rep = converge_in_X([xi] * 6, xi, U2)
    assert isinstance(rep, ConvergenceReport) and rep.converges
    assert rep.as_dict()["patterns"] == 1


def test_converge_in_X_minimal_entries():
    path = farey_geodesic(INFINITY, GOLDEN.approximant(60))
    seq = [W(("A", 1, OrientedCurve(s, 1))) for s in path[1:25]]
    rep = converge_in_X(seq, W(("A", 1, GOLDEN)), U1)
    assert rep.converges and rep.requirement2
    rep = converge_in_X(seq, W(("A", 1, SILVER)), U1)
    assert not rep.converges and not rep.requirement1


def test_converge_in_X_vanishing_weight():
    seq = []
    for n in range(1, 30):
        eps = F(1, n + 4)
        seq.append(W(("A", 1 - eps, PrefixStream(tuple(GOLDEN.quotients(n + 4)))), ("B", eps, SILVER)))
    assert converge_in_X(seq, W(("A", 1, GOLDEN)), U2)
    assert not converge_in_X(seq, W(("A", F(9, 10), GOLDEN), ("B", F(1, 10), SILVER)), U2)


def test_converge_in_X_requirement3_on_mixed_entries():
    pts = rays(U2, {"B": SILVER}, {"B": 1})
    seq = [W(("A", F(1, 2), GOLDEN), (CROSSING, F(1, 2), p)) for p in pts]
    rep = converge_in_X(seq, W(("A", F(1, 2), GOLDEN), ("B", F(1, 2), SILVER)), U2)
    assert rep.converges
    rep = converge_in_X(seq, W(("A", F(3, 4), GOLDEN), ("B", F(1, 4), SILVER)), U2)
    assert not rep.converges and not rep.requirement3 and rep.requirement1


def test_converge_in_X_needs_recurrent_pattern():
    assert not converge_in_X([W(("A", 1, GOLDEN))] * 2, W(("A", 1, GOLDEN)), U1, window=2)


# -- extraction ----------------------------------------------------------------------------

def test_extract_constant():
    xi = W(("A", F(1, 4), GOLDEN), ("B", F(3, 4), SILVER))
    ex = extract_limit([xi] * 8, U2)
    assert ex.limit == xi and list(ex.indices) == list(range(8))


def test_extract_interleaved_rays_picks_first():
    a = [cross(A=p.get("A")) for p in rays(U1, {"A": GOLDEN}, {"A": 1}, 30)]
    b = [cross(A=p.get("A")) for p in rays(U1, {"A": SILVER}, {"A": 1}, 30)]
    seq = [e for pair in zip(a, b) for e in pair]
    ex = extract_limit(seq, U1)
    assert len(ex.limit.terms) == 1 and ex.limit.terms[0].weight == 1
    assert same_limit(ex.limit, W(("A", 1, GOLDEN)), 40)
    assert all(i % 2 == 0 for i in ex.indices)
    assert converge_in_X([seq[i] for i in ex.indices], ex.limit, U1)


def test_extract_growth_rates_give_weights():
    pts = rays(U2, {"A": GOLDEN, "B": SILVER}, {"A": 2, "B": 1}, 30)
    ex = extract_limit([WeightedLamination.single(CROSSING, p) for p in pts], U2)
    assert {t.component: t.weight for t in ex.limit.terms} == {"A": F(2, 3), "B": F(1, 3)}
    assert agree(ex.limit.term("A").point, GOLDEN) and agree(ex.limit.term("B").point, SILVER)


def agree(x, y, n=20):
    return x.quotients(n) == y.quotients(n)


def test_extract_reports_insufficient_depth():
    seq = [W(("A", 1, GOLDEN)), cross(A=ZERO), W(("A", 1, SILVER))]
    with pytest.raises(InsufficientDepth):
        extract_limit(seq, U1)


def test_extract_is_deterministic():
    sc = scenario_corpus(11, 3)[2]
    a = extract_limit(sc.entries, sc.universe)
    b = extract_limit(list(sc.entries), sc.universe)
    assert a == b


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_extraction_sound_and_unique(seed, k):
    rng = random.Random(seed)
    sc = random_scenario(rng, k, 30)
    ex = extract_limit(sc.entries, sc.universe)
    sub = [sc.entries[i] for i in ex.indices]
    assert converge_in_X(sub, ex.limit, sc.universe)
    for alt in alternatives(rng, ex.limit, sc.universe, F(1, 20)):
        if converge_in_X(sub, alt, sc.universe):
            assert same_limit(alt, ex.limit, 40)


@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_extraction_equivariant(seed, k):
    rng = random.Random(seed)
    sc = random_scenario(rng, k, 30)
    phi = random_componentwise(rng, sc.universe)
    moved = [act_componentwise(phi, e, sc.universe) for e in sc.entries]
    a = extract_limit(sc.entries, sc.universe).limit
    b = extract_limit(moved, sc.universe).limit
    assert same_limit(act_componentwise(phi, a, sc.universe), b, 40)


def _rays(rng):
    while True:
        sc = random_scenario(rng, rng.randint(1, 3), 24)
        if sc.kind == "rays":
            return sc


@given(st.integers(0, 10 ** 6))
def test_join_embedding_agrees_with_product_convergence(seed):
    # for single crossing terms on a fixed sub-join, convergence in the join
    # is convergence of the product coordinates with the weight ratios
    rng = random.Random(seed)
    sc = _rays(rng)
    pts = [e.terms[0].point for e in sc.entries]
    targets = [sc.intended] + alternatives(rng, sc.intended, sc.universe, F(1, 20))
    for t in targets:
        if any(u.component == CROSSING for u in t.terms):
            continue
        if any(isinstance(u.point, OrientedCurve) and sc.universe[u.component].kind == "farey" for u in t.terms):
            continue
        assert bool(converge_in_X(sc.entries, t, sc.universe)) == converge_in_Y(pts, t, sc.universe)


# -- neighbourhoods -----------------------------------------------------------------------

def test_w_membership_examples():
    xi = W(("A", F(2, 3), GOLDEN), ("B", F(1, 3), SILVER))
    base = ProductPoint({"A": INFINITY, "B": ZERO})
    assert not w_membership(base, xi, 1, F(1, 2), U2)
    deep = rays(U2, {"A": GOLDEN, "B": SILVER}, {"A": 2, "B": 1}, 30)[-1]
    assert w_membership(deep, xi, 8, F(1, 10), U2)
    lopsided = rays(U2, {"A": GOLDEN, "B": SILVER}, {"A": 1, "B": 1}, 30)[-1]
    assert not w_membership(lopsided, xi, 8, F(1, 10), U2)
    # single-component target with heavy twisting on the other component
    U = Universe((ComponentSpace("A", "farey", INFINITY), ComponentSpace("B", "farey", INFINITY)))
    a = rays(U, {"A": GOLDEN}, {"A": 1}, 30)[-1].get("A")
    d1 = farey_distance(INFINITY, a)
    small = act_slope(twist(INFINITY, d1 // 10), ZERO)
    big = act_slope(twist(INFINITY, d1), ZERO)
    one = W(("A", 1, GOLDEN))
    assert w_membership(ProductPoint({"A": a, "B": small}), one, 4, F(1, 2), U)
    assert not w_membership(ProductPoint({"A": a, "B": big}), one, 4, F(1, 2), U)


@given(st.integers(0, 10 ** 6), st.integers(1, 12), st.integers(1, 12),
       st.sampled_from([F(1, 20), F(1, 10), F(1, 4), F(1, 2)]), st.sampled_from([F(1, 20), F(1, 10), F(1, 4), F(1, 2)]))
def test_w_sets_nest(seed, j, m, d1, d2):
    rng = random.Random(seed)
    sc = _rays(rng)
    x = rng.choice(sc.entries).terms[0].point
    lo_j, hi_j = sorted((j, m))
    lo_d, hi_d = sorted((d1, d2))
    if w_membership(x, sc.intended, hi_j, lo_d, sc.universe):
        assert w_membership(x, sc.intended, lo_j, hi_d, sc.universe)


# -- monotone envelope ------------------------------------------------------------------------

def test_envelope_examples():
    assert [v for _, v in monotone_envelope([(0, 3), (1, 1), (2, 2)])] == [3, 3, 3]
    assert monotone_envelope([(0, 1), (2, 1), (3, 5)]) == [(0, 1), (2, 1), (3, 5)]
    with pytest.raises(SemanticError):
        monotone_envelope([(0, 1), (0, 2)])
    with pytest.raises(SemanticError):
        monotone_envelope([(0, -1)])


@given(st.lists(st.integers(0, 50), max_size=30))
def test_envelope_is_running_max(vals):
    out = [v for _, v in monotone_envelope(list(enumerate(vals)))]
    assert out == list(accumulate(vals, max))


def test_envelope_is_least_majorant_exhaustively():
    for n in range(1, 5):
        for vals in product(range(4), repeat=n):
            env = [v for _, v in monotone_envelope(list(enumerate(vals)))]
            majorants = [g for g in product(range(4), repeat=n)
                         if all(a <= b for a, b in zip(g, g[1:])) and all(a >= b for a, b in zip(g, vals))]
            assert tuple(env) in majorants
            assert all(all(e <= g_i for e, g_i in zip(env, g)) for g in majorants)


# -- componentwise action and fixed sets ------------------------------------------------------

def test_fixed_set_examples():
    m = MappingClass(2, 1, 1, 1)
    nt = classify(m)
    phi = {"A": m, "B": IDENTITY}
    for a in (F(1, 3), F(1, 2)):
        for end in (nt.attracting, nt.repelling):
            assert is_fixed(phi, W(("A", a, end), ("B", 1 - a, SILVER)), U2)
    assert is_fixed(phi, W(("B", 1, OrientedCurve(Slope(4, 7), 1))), U2)
    assert not is_fixed(phi, W(("A", F(1, 2), SILVER), ("B", F(1, 2), SILVER)), U2)
    assert not is_fixed(phi, cross(A=ZERO, B=ZERO), U2)


def test_componentwise_action_on_annulus_shifts_ends_not():
    xi = W(("B", F(1, 2), OrientedCurve(INFINITY, 1)), (CROSSING, F(1, 2), ProductPoint({"A": ZERO})))
    out = act_componentwise({"A": MappingClass(1, 1, 0, 1), "B": 5}, xi, UA)
    assert out.term("B").point == OrientedCurve(INFINITY, 1)
    assert out.term(CROSSING).point == ProductPoint({"A": Slope(1, 1)})
    moved = act_componentwise({"B": 5}, cross(B=2), UA)
    assert moved.terms[0].point.get("B") == 7
