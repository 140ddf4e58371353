"""Seeded generators for join-boundary scenarios.

Sequences are built from geodesic rays so that projection distances grow at
chosen integer rates; the intended limit is returned with each sequence.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .action import MappingClass, act_slope, twist
from .boundary import OrientedCurve, PrefixStream, QuadraticIrrational, twist_floor
from .join import (
    CROSSING,
    ComponentSpace,
    ProductPoint,
    Term,
    Universe,
    WeightedLamination,
)
from .markings import random_word
from .slopes import INFINITY, Slope, farey_geodesic, mat_inverse, normalizer, apply, ZERO

IDS = ("A", "B", "C")
BASEPOINTS = (INFINITY, ZERO, Slope(1, 1), Slope(-1, 2), Slope(2, 3))


def random_qi(rng: random.Random) -> QuadraticIrrational:
    pre = [rng.randint(-3, 3)] + [rng.randint(1, 4) for _ in range(rng.randint(0, 2))]
    per = [rng.randint(1, 4) for _ in range(rng.randint(1, 3))]
    return QuadraticIrrational(tuple(pre), tuple(per))


def random_slope(rng: random.Random, height: int = 12) -> Slope:
    while True:
        q = rng.randint(0, height)
        p = rng.randint(-height, height) if q else 1
        try:
            return Slope.of(p, q)
        except Exception:
            continue


def random_universe(rng: random.Random, k: int, annulus_ok: bool = True) -> Universe:
    comps = []
    for i in range(k):
        if annulus_ok and i > 0 and rng.random() < 0.3:
            comps.append(ComponentSpace(IDS[i], "annulus"))
        else:
            comps.append(ComponentSpace(IDS[i], "farey", rng.choice(BASEPOINTS)))
    return Universe(tuple(comps))


def random_point(rng: random.Random, comp: ComponentSpace, curves: bool = True):
    if comp.kind == "annulus":
        return OrientedCurve(INFINITY, rng.choice((1, -1)))
    if curves and rng.random() < 0.3:
        return OrientedCurve(random_slope(rng), rng.choice((1, -1)))
    return random_qi(rng)


class Ray:
    """Coordinates on one component at prescribed distance k from the
    basepoint, heading to a fixed target point."""

    def __init__(self, comp: ComponentSpace, target, reach: int):
        self.comp, self.target = comp, target
        if comp.kind == "annulus":
            self.path = None
        elif isinstance(target, OrientedCurve):
            c = target.slope
            self.start = comp.basepoint if comp.basepoint != c else apply(mat_inverse(normalizer(c)), ZERO)
            self.path = None
        else:
            n = 8
            while True:
                path = farey_geodesic(comp.basepoint, target.approximant(n))
                if len(path) > reach + 8:
                    break
                n *= 2
            self.path = path

    def at(self, k: int):
        if self.comp.kind == "annulus":
            return self.target.sign * k
        if self.path is None:
            return act_slope(twist(self.target.slope, self.target.sign * k), self.start)
        return self.path[k]


@dataclass(frozen=True)
class Scenario:
    kind: str
    universe: Universe
    entries: tuple
    intended: WeightedLamination


def _near_basepoint(rng, comp):
    # bounded noise: the basepoint or one of its Farey neighbours
    if comp.kind == "annulus":
        return rng.randint(-1, 1)
    back = mat_inverse(normalizer(comp.basepoint))
    return rng.choice([comp.basepoint, apply(back, Slope(rng.randint(-2, 2), 1))])


def _normal(weights: dict) -> dict:
    t = sum(weights.values())
    return {k: Fraction(v) / t for k, v in weights.items()}


def _rays_scenario(rng, universe, length, comps, rates, kind="rays"):
    targets = {c: random_point(rng, universe[c]) for c in comps}
    rays = {c: Ray(universe[c], targets[c], max(rates.values()) * (length + 4)) for c in comps}
    extra = {}
    for comp in universe.components:
        if comp.id not in comps and rng.random() < 0.5:
            extra[comp.id] = _near_basepoint(rng, comp)
    entries = []
    for n in range(1, length + 1):
        coords = {c: rays[c].at(rates[c] * n) for c in comps}
        coords.update(extra)
        entries.append(WeightedLamination.single(CROSSING, ProductPoint(coords)))
    w = _normal(rates)
    intended = WeightedLamination(tuple(Term(c, w[c], targets[c]) for c in comps))
    return Scenario(kind, universe, tuple(entries), intended)


def _curve_scenario(rng, universe, length):
    # single curves heading to an irrational
    comp = universe.components[0]
    target = random_qi(rng)
    ray = Ray(comp, target, length + 4)
    entries = tuple(WeightedLamination.single(comp.id, OrientedCurve(ray.at(n), rng.choice((1, -1))))
                    for n in range(1, length + 1))
    return Scenario("curves", universe, entries, WeightedLamination.single(comp.id, target))


def _constant_scenario(rng, universe, length):
    ids = [c.id for c in universe.components]
    chosen = rng.sample(ids, rng.randint(1, len(ids)))
    raw = {c: rng.randint(1, 3) for c in chosen}
    w = _normal(raw)
    target = WeightedLamination(tuple(Term(c, w[c], random_point(rng, universe[c])) for c in chosen))
    return Scenario("constant", universe, (target,) * length, target)


def _mixed_scenario(rng, universe, length):
    ids = [c.id for c in universe.components]
    bcomp = rng.choice(ids)
    rest = [c for c in ids if c != bcomp]
    comps = rng.sample(rest, rng.randint(1, len(rest)))
    rates = {c: rng.randint(3, 5) for c in comps}
    base = rays_scenario = _rays_scenario(rng, universe, length, comps, rates)
    b = Fraction(rng.randint(1, 3), 4)
    bpoint = random_point(rng, universe[bcomp])
    entries = []
    for n, e in enumerate(base.entries, start=1):
        wb = b + Fraction(1, (n + 6) ** 3)
        if isinstance(bpoint, QuadraticIrrational):
            pt = PrefixStream(tuple(bpoint.quotients(n + 4)))
        else:
            pt = bpoint
        cross = e.terms[0].point
        cross = ProductPoint({k: v for k, v in cross.coords if k != bcomp})
        entries.append(WeightedLamination((Term(bcomp, wb, pt), Term(CROSSING, 1 - wb, cross))))
    terms = [Term(bcomp, b, bpoint)] + [Term(t.component, (1 - b) * t.weight, t.point)
                                        for t in rays_scenario.intended.terms]
    return Scenario("mixed", universe, tuple(entries), WeightedLamination(tuple(terms)))


def _vanishing_scenario(rng, universe, length):
    a, other = rng.sample([c.id for c in universe.components], 2)
    target = random_point(rng, universe[a], curves=False)
    noise = random_point(rng, universe[other])
    entries = []
    for n in range(1, length + 1):
        pt = PrefixStream(tuple(target.quotients(n + 4))) if isinstance(target, QuadraticIrrational) else target
        eps = Fraction(1, n + 4)
        entries.append(WeightedLamination((Term(a, 1 - eps, pt), Term(other, eps, noise))))
    return Scenario("vanishing", universe, tuple(entries), WeightedLamination.single(a, target))


def _interleave(rng, universe, length, make):
    s1 = make(rng, universe, length)
    s2 = make(rng, universe, length)
    entries = [e for pair in zip(s1.entries, s2.entries) for e in pair]
    return Scenario("interleave", universe, tuple(entries), s1.intended)


def random_scenario(rng: random.Random, k: int, length: int = 40) -> Scenario:
    universe = random_universe(rng, k)
    ids = [c.id for c in universe.components]

    def rays(rng, universe, length):
        comps = rng.sample(ids, rng.randint(1, len(ids)))
        return _rays_scenario(rng, universe, length, comps, {c: rng.randint(3, 5) for c in comps})

    kinds = ["rays", "constant", "interleave"]
    if universe.components[0].kind == "farey":
        kinds.append("curves")
    if k > 1:
        kinds += ["mixed", "vanishing"]
    kind = rng.choice(kinds)
    if kind == "rays":
        return rays(rng, universe, length)
    if kind == "constant":
        return _constant_scenario(rng, universe, length)
    if kind == "curves":
        return _curve_scenario(rng, universe, length)
    if kind == "mixed":
        return _mixed_scenario(rng, universe, length)
    if kind == "vanishing":
        return _vanishing_scenario(rng, universe, length)
    return _interleave(rng, universe, length, rays)


def scenario_corpus(seed: int, size: int, length: int = 40) -> list[Scenario]:
    """Fixed-seed scenarios cycling through 1, 2 and 3 components."""
    rng = random.Random(seed)
    return [random_scenario(rng, 1 + i % 3, length) for i in range(size)]


def random_componentwise(rng: random.Random, universe: Universe) -> dict:
    out = {}
    for comp in universe.components:
        if comp.kind == "annulus":
            out[comp.id] = rng.randint(-4, 4)
        else:
            out[comp.id] = random_word(rng, rng.randint(1, 3), 2)
    return out


def alternatives(rng: random.Random, limit: WeightedLamination, universe: Universe, tol: Fraction) -> list:
    """Competing targets near a limit: perturbed points, flipped ends,
    shifted weights, dropped or added terms."""
    out = []
    terms = list(limit.terms)
    for i, t in enumerate(terms):
        p = t.point
        if isinstance(p, OrientedCurve):
            alts = [OrientedCurve(p.slope, -p.sign)]
            if universe[t.component].kind == "farey":
                alts.append(OrientedCurve(random_slope(rng), p.sign))
                alts.append(random_qi(rng))
        else:
            n = int(min(p.available_depth, 30))
            qs = p.quotients(n)
            k = rng.randint(1, max(1, n - 1))
            head = list(qs[:k])
            head.append(qs[k] + rng.randint(1, 3) if k < n else rng.randint(1, 4))
            alts = [QuadraticIrrational(tuple(head), (rng.randint(1, 4),)), random_qi(rng)]
        for a in alts:
            out.append(WeightedLamination(tuple(Term(u.component, u.weight, a if j == i else u.point)
                                                for j, u in enumerate(terms))))
    if len(terms) > 1:
        shift = 3 * tol
        i, j = 0, 1
        if terms[i].weight > shift:
            ws = [u.weight for u in terms]
            ws[i] -= shift
            ws[j] += shift
            out.append(WeightedLamination(tuple(Term(u.component, w, u.point) for u, w in zip(terms, ws))))
        rest = terms[1:]
        tot = sum(u.weight for u in rest)
        out.append(WeightedLamination(tuple(Term(u.component, u.weight / tot, u.point) for u in rest)))
    used = {t.component for t in terms}
    free = [c for c in universe.components if c.id not in used]
    if free:
        comp = rng.choice(free)
        w = 3 * tol
        new = [Term(u.component, u.weight * (1 - w), u.point) for u in terms]
        new.append(Term(comp.id, w, random_point(rng, comp)))
        out.append(WeightedLamination(tuple(new)))
    return out
