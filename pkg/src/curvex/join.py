"""Join boundaries over several components, convergence and limit extraction.

A universe is a list of components, each either a Farey graph (curve graph of
a once-punctured torus, with a basepoint slope) or an annulus (coordinates
are twist integers, boundary {+, -}).  A point of the boundary is a
``WeightedLamination``: terms (component, weight, point) with positive
rational weights summing to one.  A term on component ``"*"`` is a minimal
lamination crossing several components; its point is a ``ProductPoint``
holding the projections.

Convergence is certified on finite data.  For each target term the
"target subsurface" is the component itself (irrational target), the annulus
about a curve c (target c+ or c-), or an annulus component (target an end).
Terms filling the target subsurface contribute their weight directly; the
remaining mass is shared among target subsurfaces in proportion to how far
the remaining terms project from the basepoints.  Every verdict is "at this
depth, tolerance and window".
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from . import _kernels
from .action import MappingClass, act_boundary, act_slope, mobius_quotients
from .boundary import (
    OrientedCurve,
    PrefixStream,
    QuadraticIrrational,
    _convergent,
    _settled_product,
    gromov_product,
    twist_floor,
    window_progress,
)
from .errors import IndistinguishableAtDepth, InsufficientDepth, SemanticError
from .slopes import INFINITY, Slope, cf_quotients, ladder_vertices, normalizer

CROSSING = "*"
INF = float("inf")

Coordinate = Union[Slope, int]


@dataclass(frozen=True)
class ComponentSpace:
    id: str
    kind: str  # "farey" | "annulus"
    basepoint: Slope | None = None
    core: Slope | None = None  # annulus: slope used to read twist data off witnessing slopes

    def __post_init__(self):
        if self.kind not in ("farey", "annulus"):
            raise SemanticError(f"unknown component kind {self.kind!r}")
        if self.id == CROSSING or not self.id:
            raise SemanticError(f"invalid component id {self.id!r}")
        if self.kind == "farey" and self.basepoint is None:
            object.__setattr__(self, "basepoint", INFINITY)


@dataclass(frozen=True)
class Universe:
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        ids = [c.id for c in self.components]
        if len(set(ids)) != len(ids):
            raise SemanticError("component ids must be distinct")
        if not ids:
            raise SemanticError("a universe needs at least one component")

    def __getitem__(self, cid: str) -> ComponentSpace:
        for c in self.components:
            if c.id == cid:
                return c
        raise SemanticError(f"unknown component {cid!r}")

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.components]


@dataclass(frozen=True)
class ProductPoint:
    """Per-component coordinates; a missing component sits at its basepoint."""

    coords: tuple

    def __post_init__(self):
        items = self.coords.items() if isinstance(self.coords, Mapping) else self.coords
        items = tuple(sorted((str(k), v) for k, v in items))
        if len({k for k, _ in items}) != len(items):
            raise SemanticError("duplicate coordinate")
        for k, v in items:
            if not isinstance(v, (Slope, int)) or isinstance(v, bool):
                raise SemanticError(f"coordinate {k} must be a slope or an integer")
        object.__setattr__(self, "coords", items)

    def get(self, cid: str) -> Coordinate | None:
        for k, v in self.coords:
            if k == cid:
                return v
        return None

    @property
    def components(self) -> list[str]:
        return [k for k, _ in self.coords]


@dataclass(frozen=True)
class Term:
    component: str
    weight: Fraction
    point: object  # BoundaryPoint, or ProductPoint for the crossing term

    def __post_init__(self):
        object.__setattr__(self, "weight", Fraction(self.weight))
        if self.weight <= 0:
            raise SemanticError("term weights must be positive")
        if (self.component == CROSSING) != isinstance(self.point, ProductPoint):
            raise SemanticError("exactly the crossing term carries a ProductPoint")


@dataclass(frozen=True)
class WeightedLamination:
    terms: tuple

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise SemanticError("empty lamination")
        comps = [t.component for t in terms]
        if len(set(comps)) != len(comps):
            raise SemanticError("component ids must be distinct")
        if sum(t.weight for t in terms) != 1:
            raise SemanticError("weights must sum to 1")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, component: str, point) -> "WeightedLamination":
        return cls((Term(component, Fraction(1), point),))

    def term(self, cid: str) -> Term | None:
        for t in self.terms:
            if t.component == cid:
                return t
        return None

    def validate(self, universe: Universe) -> "WeightedLamination":
        own = set()
        for t in self.terms:
            if t.component == CROSSING:
                continue
            comp = universe[t.component]
            own.add(t.component)
            if comp.kind == "annulus" and not isinstance(t.point, OrientedCurve):
                raise SemanticError(f"annulus {comp.id} only carries its two ends")
            if comp.kind == "farey" and not isinstance(t.point, (OrientedCurve, QuadraticIrrational, PrefixStream)):
                raise SemanticError(f"bad point on {comp.id}")
        cross = self.term(CROSSING)
        if cross is not None:
            for cid in cross.point.components:
                comp = universe[cid]
                if cid in own:
                    raise SemanticError(f"crossing term meets {cid}, which another term occupies")
                v = cross.point.get(cid)
                if comp.kind == "farey" and not isinstance(v, Slope):
                    raise SemanticError(f"crossing coordinate on {cid} must be a slope")
                if comp.kind == "annulus" and isinstance(v, Slope) and comp.core is None:
                    raise SemanticError(f"annulus {cid} has no core to read a slope against")
        return self


@dataclass(frozen=True)
class SequenceTrace:
    entries: tuple
    indices: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        idx = tuple(self.indices) or tuple(range(len(self.entries)))
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise SemanticError("indices must be strictly increasing")
        object.__setattr__(self, "indices", idx)


# -- basic per-component geometry -------------------------------------------

def _dist(a: Slope, b: Slope) -> int:
    return _kernels.pair_distance(a.p, a.q, b.p, b.q)


def _is_irrational(x) -> bool:
    return isinstance(x, (QuadraticIrrational, PrefixStream))


def _annulus_value(comp: ComponentSpace, v: Coordinate) -> int:
    if isinstance(v, int):
        return v
    return twist_floor(v, comp.core)


def component_gauge(comp: ComponentSpace, v: Coordinate | None) -> int:
    """Distance of a coordinate from the component basepoint."""
    if v is None:
        return 0
    if comp.kind == "annulus":
        return abs(_annulus_value(comp, v))
    return _dist(comp.basepoint, v)


def complement_gauge(comp: ComponentSpace, v: Coordinate | None) -> int:
    """Gauge on a component outside the target support: the Farey distance
    or the largest twisting about a curve on the geodesic, whichever is
    bigger (twisting keeps Farey distance bounded but is not negligible)."""
    g = component_gauge(comp, v)
    if comp.kind == "annulus" or v is None or v == comp.basepoint:
        return g
    x = comp.basepoint
    for c in ladder_vertices(x, v):
        if c != v:
            g = max(g, abs(twist_floor(v, c) - _curve_ref(comp, c)))
    return g


def _curve_ref(comp: ComponentSpace, c: Slope) -> int:
    return twist_floor(comp.basepoint, c) if comp.basepoint != c else 0


def _irrational_twist(x, c: Slope, depth: int) -> int | None:
    """floor of N_c(x) for an irrational x, certified from its CF prefix."""
    n = min(depth, int(min(x.available_depth, 10 ** 6)))
    out = mobius_quotients(normalizer(c), x.quotients(n))
    return out[0] if out else None


# -- target analysis ---------------------------------------------------------

@dataclass
class _Slot:
    comp: ComponentSpace
    weight: Fraction
    point: object
    kind: str          # "fill" | "curve" | "end"
    sign: int = 0
    work: object = None  # working-depth target for products
    cap: float = INF


def _slots(target: WeightedLamination, universe: Universe, depth: int) -> list[_Slot]:
    out = []
    for t in target.terms:
        if t.component == CROSSING:
            raise SemanticError("a limit cannot carry a crossing term")
        comp = universe[t.component]
        p = t.point
        if comp.kind == "annulus":
            if not isinstance(p, OrientedCurve):
                raise SemanticError(f"annulus target on {comp.id} must be an end")
            out.append(_Slot(comp, t.weight, p, "end", p.sign))
        elif isinstance(p, OrientedCurve):
            out.append(_Slot(comp, t.weight, p, "curve", p.sign))
        elif _is_irrational(p):
            if p.available_depth == INF:
                out.append(_Slot(comp, t.weight, p, "fill", 0, p, INF))
            else:
                d = int(p.available_depth)
                cap = max(1, _dist(comp.basepoint, p.approximant(d)) - 2)
                out.append(_Slot(comp, t.weight, p, "fill", 0, p, cap))
        else:
            raise SemanticError(f"unsupported target point {p!r}")
    return out


@dataclass
class _Stats:
    boundary: list          # B per slot
    wrong: list             # wrong-sign boundary mass per slot
    bprog: list             # boundary progress per slot (None if no boundary term)
    gauge: list             # interior gauge per slot
    prog: list              # interior progress per slot (None if no projection)
    interior: Fraction      # 1 - sum B - sum wrong
    stray_mass: Fraction    # weight on components without a slot
    stray_gauge: int        # crossing gauges on components without a slot

    @property
    def total_gauge(self) -> int:
        return sum(self.gauge)

    def effective(self) -> list[Fraction]:
        d = self.total_gauge
        if d == 0:
            return list(self.boundary)
        return [b + self.interior * Fraction(g, d) for b, g in zip(self.boundary, self.gauge)]


def _fill_product(slot: _Slot, x, base: Slope, depth: int) -> float:
    # Gromov product of a boundary point or slope with the slot target, saturating at the cap
    if isinstance(x, Slope):
        return min(_settled_product(x, slot.work, base), slot.cap)
    d = int(min(depth, x.available_depth, slot.work.available_depth))
    try:
        return min(gromov_product(x, slot.work, base, d).lower, slot.cap)
    except IndistinguishableAtDepth:
        return slot.cap


def _matches(slot: _Slot, point) -> bool:
    if slot.kind == "fill":
        return _is_irrational(point)
    if slot.kind == "curve":
        return isinstance(point, OrientedCurve) and point.slope == slot.point.slope
    return isinstance(point, OrientedCurve)


def _projection(slot: _Slot, source, depth: int) -> tuple[int, float] | None:
    """(gauge, progress) of a non-filling source projected to the slot."""
    comp = slot.comp
    if slot.kind == "fill":
        s = source.slope if isinstance(source, OrientedCurve) else source
        if not isinstance(s, Slope):
            return None
        return _dist(comp.basepoint, s), _fill_product(slot, s, comp.basepoint, depth)
    if slot.kind == "curve":
        c = slot.point.slope
        if _is_irrational(source):
            tw = _irrational_twist(source, c, depth)
            if tw is None:
                return None
        else:
            s = source.slope if isinstance(source, OrientedCurve) else source
            if s == c:
                return None
            tw = twist_floor(s, c)
        v = tw - _curve_ref(comp, c)
        return abs(v), slot.sign * v
    v = _annulus_value(comp, source)
    return abs(v), slot.sign * v


def _stats(entry: WeightedLamination, slots: list[_Slot], universe: Universe, depth: int) -> _Stats:
    n = len(slots)
    by_comp = {s.comp.id: i for i, s in enumerate(slots)}
    boundary = [Fraction(0)] * n
    wrong = [Fraction(0)] * n
    bprog: list = [None] * n
    sources: list = [None] * n
    stray_mass = Fraction(0)
    stray_gauge = 0
    for t in entry.terms:
        if t.component == CROSSING:
            for cid, v in t.point.coords:
                if cid in by_comp:
                    sources[by_comp[cid]] = v
                else:
                    stray_gauge += complement_gauge(universe[cid], v)
            continue
        i = by_comp.get(t.component)
        if i is None:
            stray_mass += t.weight
            continue
        slot = slots[i]
        if _matches(slot, t.point):
            if slot.kind == "fill":
                boundary[i] += t.weight
                p = _fill_product(slot, t.point, slot.comp.basepoint, depth)
                bprog[i] = p if bprog[i] is None else min(bprog[i], p)
            elif t.point.sign == slot.sign:
                boundary[i] += t.weight
                bprog[i] = INF
            else:
                wrong[i] += t.weight
        elif sources[i] is None:
            sources[i] = t.point
    gauge = [0] * n
    prog: list = [None] * n
    for i, src in enumerate(sources):
        if src is None:
            continue
        pr = _projection(slots[i], src, depth)
        if pr is not None:
            gauge[i], prog[i] = pr
    interior = 1 - sum(boundary) - sum(wrong)
    return _Stats(boundary, wrong, bprog, gauge, prog, interior, stray_mass, stray_gauge)


# -- patterns ----------------------------------------------------------------

def support_pattern(entry: WeightedLamination) -> frozenset:
    out = set()
    for t in entry.terms:
        if t.component == CROSSING:
            out.add((CROSSING, tuple(t.point.components)))
        elif isinstance(t.point, OrientedCurve):
            out.add((t.component, "curve"))
        else:
            out.add((t.component, "irrational"))
    return frozenset(out)


def recurrent_patterns(seq: Sequence[WeightedLamination], window: int) -> list[tuple[frozenset, list[int]]]:
    """Patterns seen at least window+1 times and at least once in the last
    half of the sequence, ordered by first occurrence."""
    where: dict = {}
    for i, e in enumerate(seq):
        where.setdefault(support_pattern(e), []).append(i)
    half = len(seq) // 2
    out = [(p, idx) for p, idx in where.items() if len(idx) >= window + 1 and idx[-1] >= half]
    out.sort(key=lambda pi: pi[1][0])
    return out


# -- convergence -------------------------------------------------------------

@dataclass
class ConvergenceReport:
    converges: bool
    requirement1: bool = True
    requirement2: bool = True
    requirement3: bool = True
    patterns: int = 0
    notes: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.converges

    def as_dict(self) -> dict:
        return {
            "converges": self.converges,
            "requirement1": self.requirement1,
            "requirement2": self.requirement2,
            "requirement3": self.requirement3,
            "patterns": self.patterns,
            "notes": list(self.notes),
        }


def _stray_increments_vanish(stats: list[_Stats], tol: Fraction) -> bool:
    # ratio of increments over the second half (Stolz-Cesaro): bounded stray
    # gauges are negligible once the target gauges keep growing
    if len(stats) < 4:
        return False
    early, late = stats[len(stats) // 2], stats[-1]
    grow = late.total_gauge - early.total_gauge
    if grow <= 0:
        return False
    return late.stray_gauge - early.stray_gauge <= tol * grow


def _check_pattern(stats: list[_Stats], slots: list[_Slot], tol: Fraction, window: int,
                   minimal: bool, report: ConvergenceReport, label: str) -> None:
    tail = stats[-window:]

    def fail(req: int, msg: str) -> None:
        if req == 1:
            report.requirement1 = False
        elif req == 2:
            report.requirement2 = False
        else:
            report.requirement3 = False
        report.notes.append(f"{label}: {msg}")

    for i, slot in enumerate(slots):
        name = f"{slot.comp.id}"
        if any(s.boundary[i] > 0 for s in stats) and slot.kind == "fill":
            series = [s.bprog[i] for s in stats if s.bprog[i] is not None]
            if not window_progress(series, window, slot.cap):
                fail(1, f"boundary terms on {name} do not approach the target")
        last = stats[-1]
        d = last.total_gauge
        share = last.interior * Fraction(last.gauge[i], d) if d else Fraction(0)
        if share > tol:
            series = [s.prog[i] for s in stats if s.prog[i] is not None]
            if not window_progress(series, window, slot.cap):
                fail(1, f"projections to {name} do not approach the target")
        for s in tail:
            if s.boundary[i] == 0 and s.gauge[i] == 0:
                fail(1, f"entries miss the support on {name}")
                break
    req = 2 if minimal else 3
    for s in tail:
        eff = s.effective()
        for i, slot in enumerate(slots):
            if abs(eff[i] - slot.weight) > tol:
                fail(req, f"weight on {slot.comp.id} is {float(eff[i]):.4f}, target {float(slot.weight):.4f}")
                return
            if s.wrong[i] > tol:
                fail(req, f"opposite end on {slot.comp.id} keeps weight {float(s.wrong[i]):.4f}")
                return
        if s.stray_mass > tol:
            fail(req, f"weight {float(s.stray_mass):.4f} outside the target components")
            return
        d = s.total_gauge
        if d == 0 and s.interior > tol:
            fail(req, f"interior mass {float(s.interior):.4f} with bounded projections")
            return
        if d and Fraction(s.stray_gauge, d) > tol and not _stray_increments_vanish(stats, tol):
            fail(req, "projections to non-target components do not become negligible")
            return


def converge_in_X(seq: Sequence[WeightedLamination], target: WeightedLamination, universe: Universe,
                  tolerance=Fraction(1, 20), window: int = 2, depth: int = 40) -> ConvergenceReport:
    """Finite-evidence check of the three convergence requirements.

    Every support pattern recurring in the sequence is examined separately;
    all of them must pass.
    """
    tol = Fraction(tolerance)
    target.validate(universe)
    slots = _slots(target, universe, depth)
    report = ConvergenceReport(True)
    pats = recurrent_patterns(seq, window)
    report.patterns = len(pats)
    if not pats:
        report.converges = False
        report.requirement1 = False
        report.notes.append("no recurrent support pattern")
        return report
    for pat, idx in pats:
        stats = [_stats(seq[i], slots, universe, depth) for i in idx]
        minimal = all(len(seq[i].terms) == 1 for i in idx)
        _check_pattern(stats, slots, tol, window, minimal, report, f"pattern@{idx[0]}")
    report.converges = report.requirement1 and report.requirement2 and report.requirement3
    return report


def converge_in_Y(seq: Sequence[ProductPoint], target: WeightedLamination, universe: Universe,
                  tolerance=Fraction(1, 20), window: int = 2, depth: int = 40) -> bool:
    """Product-space convergence: each weighted coordinate approaches its
    target point and d_i/d_1 settles within tolerance of a_i/a_1."""
    tol = Fraction(tolerance)
    slots = _slots(target, universe, depth)
    if any(s.kind == "curve" for s in slots):
        raise SemanticError("product-space targets live in component boundaries")
    if len(seq) <= window:
        return False
    first = slots[0]
    rows = []
    for pt in seq:
        gauges, progs = [], []
        for slot in slots:
            v = pt.get(slot.comp.id)
            pr = _projection(slot, v, depth) if v is not None else None
            gauges.append(pr[0] if pr else 0)
            progs.append(pr[1] if pr else None)
        others = sum(complement_gauge(universe[c], pt.get(c)) for c in pt.components
                     if c not in {s.comp.id for s in slots})
        rows.append((gauges, progs, others))
    for i, slot in enumerate(slots):
        series = [r[1][i] for r in rows]
        if any(v is None for v in series) or not window_progress(series, window, slot.cap):
            return False
    for gauges, _, others in rows[-window:]:
        d1 = gauges[0]
        if d1 == 0:
            return False
        for i, slot in enumerate(slots[1:], start=1):
            if abs(Fraction(gauges[i], d1) - slot.weight / first.weight) > tol:
                return False
        if Fraction(others, d1) > tol:
            return False
    return True


# -- projections -------------------------------------------------------------

def _fills(comp: ComponentSpace, point) -> bool:
    if comp.kind == "annulus":
        return isinstance(point, OrientedCurve)
    return _is_irrational(point)


def pr_Y(nu: WeightedLamination, universe: Universe):
    """Projection of a single minimal term: the term itself when it fills its
    component, otherwise the ProductPoint with basepoint fallback."""
    if len(nu.terms) != 1:
        raise SemanticError("pr_Y takes a single minimal term")
    t = nu.terms[0]
    if t.component == CROSSING:
        coords = {}
        for cid in universe.ids:
            v = t.point.get(cid)
            comp = universe[cid]
            if v is None:
                v = comp.basepoint if comp.kind == "farey" else 0
            elif comp.kind == "annulus":
                v = _annulus_value(comp, v)
            coords[cid] = v
        return ProductPoint(coords)
    comp = universe[t.component]
    if _fills(comp, t.point):
        return t
    coords = {c.id: (c.basepoint if c.kind == "farey" else 0) for c in universe.components}
    coords[comp.id] = t.point.slope
    return ProductPoint(coords)


@dataclass(frozen=True)
class MixedPoint:
    boundary: tuple               # Terms passing through unchanged
    product_mass: Fraction
    product: ProductPoint | None


def pr_Z(xi: WeightedLamination, designated: Iterable[str], universe: Universe) -> MixedPoint:
    des = set(designated)
    passing, rest = [], []
    for t in xi.terms:
        if t.component != CROSSING and _fills(universe[t.component], t.point):
            if t.component not in des:
                raise SemanticError(f"{t.component} is filled but not designated")
            passing.append(t)
        else:
            rest.append(t)
    mass = 1 - sum(t.weight for t in passing)
    if not rest:
        return MixedPoint(tuple(passing), Fraction(0), None)
    coords = {c.id: (c.basepoint if c.kind == "farey" else 0)
              for c in universe.components if c.id not in des}
    for t in rest:
        if t.component == CROSSING:
            for cid, v in t.point.coords:
                if cid in coords:
                    coords[cid] = _annulus_value(universe[cid], v) if universe[cid].kind == "annulus" else v
        elif t.component in coords:
            coords[t.component] = t.point.slope
    return MixedPoint(tuple(passing), mass, ProductPoint(coords))


# -- limit extraction ---------------------------------------------------------

END = ("end",)


def _component_code(entry: WeightedLamination, comp: ComponentSpace, depth: int):
    """(kind, code) describing an entry's data on one component, or None."""
    t = entry.term(comp.id)
    if t is not None:
        p = t.point
        if comp.kind == "annulus":
            return "end", (("sign", p.sign),)
        if isinstance(p, OrientedCurve):
            return "curve", _slope_code(p.slope) + (("sign", p.sign),)
        n = int(min(depth, p.available_depth))
        return "irrational", tuple(p.quotients(n))
    cross = entry.term(CROSSING)
    v = cross.point.get(comp.id) if cross is not None else None
    if v is None:
        return None
    if comp.kind == "annulus":
        return "int", (_annulus_value(comp, v),)
    return "slope", _slope_code(v)


def _slope_code(s: Slope) -> tuple:
    return () if s.is_infinite else tuple(cf_quotients(s.p, s.q))


@dataclass
class _Branch:
    kind: str            # "prefix" | "curve" | "diverge" | "bounded" | "end"
    prefix: tuple = ()
    sign: int = 0


def _recurs(members: list[int], pool: list[int], m: int) -> bool:
    half = pool[len(pool) // 2] if pool else 0
    return len(members) >= m and members[-1] >= half


def _tail_key(members: list[int], tail_from: int) -> int:
    # branches are ranked by their earliest tail entry; early entries sit near
    # the basepoint and their codes depend on coordinates
    return next((i for i in members if i >= tail_from), 1 << 62)


def _descend(codes: dict[int, tuple], kind: str, comp: ComponentSpace, m: int,
             depth: int, tail_from: int = 0) -> tuple[list[int], _Branch]:
    pool = sorted(codes)
    prefix: list = []
    level = 0
    while True:
        if kind == "irrational" and level >= depth:
            return pool, _Branch("prefix", tuple(prefix))
        groups: dict = {}
        for i in pool:
            code = codes[i]
            tok = code[level] if level < len(code) else END
            groups.setdefault(tok, []).append(i)
        if kind == "irrational" and END in groups:
            # some prefix stream ran out: resolution ends here
            if len(groups) == 1:
                return pool, _Branch("prefix", tuple(prefix))
            del groups[END]
        live = [(tok, mem) for tok, mem in groups.items() if _recurs(mem, pool, m)]
        taken = {i for _, mem in live for i in mem}
        rest = [i for i in pool if i not in taken and level < len(codes[i])
                and not isinstance(codes[i][level], tuple)]
        c = _convergent(prefix) if prefix else INFINITY
        cands = [(tok, mem) for tok, mem in live]
        cands += [(("grow", sg), mem) for sg, mem in _growth(rest, lambda i: codes[i][level],
                                                            lambda i: _code_slope(codes[i]), c, comp, m)]
        if not cands:
            # nothing recurs and nothing grows: resolution ends here
            if not prefix:
                raise InsufficientDepth(f"component {comp.id}: no recurring branch")
            return pool, _Branch("prefix", tuple(prefix))
        tok, mem = min(cands, key=lambda tm: _tail_key(tm[1], tail_from))
        if tok == END:
            return mem, _Branch("bounded", tuple(prefix))
        if isinstance(tok, tuple) and tok[0] == "grow":
            return mem, _Branch("diverge", tuple(prefix), tok[1])
        if isinstance(tok, tuple):  # sign token after a curve code
            return mem, _Branch("curve", tuple(prefix), tok[1])
        prefix.append(tok)
        pool = mem
        level += 1


def _growth(rest: list[int], token, slope, c: Slope, comp: ComponentSpace, m: int) -> list:
    """Entries whose next quotient keeps changing, split by the side from
    which they approach c; each side needs m distinct values."""
    out = []
    for sign in (1, -1):
        mem = []
        for i in rest:
            if comp.kind == "farey":
                v = twist_floor(slope(i), c) - _curve_ref(comp, c)
            else:
                v = token(i)
            if (v > 0) == (sign > 0):
                mem.append(i)
        if len({token(i) for i in mem}) >= m:
            out.append((sign, mem))
    return out


def _code_slope(code: tuple) -> Slope:
    qs = [a for a in code if not isinstance(a, tuple)]
    return _convergent(qs) if qs else INFINITY


def _descend_annulus(codes: dict[int, tuple], kind: str, comp: ComponentSpace, m: int,
                     tail_from: int = 0) -> tuple[list[int], _Branch]:
    pool = sorted(codes)
    groups: dict = {}
    for i in pool:
        groups.setdefault(codes[i][0], []).append(i)
    live = [(tok, mem) for tok, mem in groups.items() if _recurs(mem, pool, m)]
    taken = {i for _, mem in live for i in mem}
    rest = [i for i in pool if i not in taken and kind == "int"]
    cands = list(live) + [(("grow", sg), mem) for sg, mem in
                          _growth(rest, lambda i: codes[i][0], None, INFINITY, comp, m)]
    if not cands:
        raise InsufficientDepth(f"component {comp.id}: neither recurring nor growing")
    tok, mem = min(cands, key=lambda tm: _tail_key(tm[1], tail_from))
    if isinstance(tok, tuple) and tok[0] == "grow":
        return mem, _Branch("diverge", (), tok[1])
    if kind == "end":
        return mem, _Branch("end", (), tok[1])
    return mem, _Branch("bounded")


def _branch_point(comp: ComponentSpace, b: _Branch):
    if comp.kind == "annulus":
        return OrientedCurve(INFINITY, b.sign)
    if b.kind == "prefix":
        return PrefixStream(b.prefix)
    c = _convergent(b.prefix) if b.prefix else INFINITY
    return OrientedCurve(c, b.sign)


def _exact_point(seq, pool: list[int], comp: ComponentSpace, br: _Branch):
    # a prefix branch whose entries all carry one exact point converges to it
    if br.kind != "prefix":
        return None
    pts = set()
    for i in pool:
        t = seq[i].term(comp.id)
        if t is None or not isinstance(t.point, QuadraticIrrational):
            return None
        pts.add(t.point)
    if len(pts) != 1:
        return None
    (x,) = pts
    return x if tuple(x.quotients(len(br.prefix))) == br.prefix else None


def _snap_all(ws: list[Fraction], tol: Fraction, den: int = 64) -> list[Fraction]:
    # round to nearby simple fractions when that keeps the total at one
    out = []
    for w in ws:
        s = w.limit_denominator(den)
        out.append(s if abs(s - w) <= tol / 4 else w)
    return out if sum(out) == 1 else ws


@dataclass(frozen=True)
class ExtractedLimit:
    indices: tuple
    limit: WeightedLamination


def extract_limit(seq: Sequence[WeightedLamination], universe: Universe, depth: int = 40, window: int = 2,
                  tolerance=Fraction(1, 20)) -> ExtractedLimit:
    """Choose a convergent subsequence and its limit.

    Deterministic: the lowest-index recurrent support pattern, then per
    component (universe order) the recurring continued-fraction branch
    holding the earliest entry of the pattern's second half.  Raises InsufficientDepth when the data cannot certify a limit.
    """
    tol = Fraction(tolerance)
    for e in seq:
        e.validate(universe)
    pats = recurrent_patterns(seq, window)
    if not pats:
        raise InsufficientDepth("no support pattern recurs")
    full = list(pats[0][1])
    pool = full
    tail_from = full[len(full) // 2]
    m = window + 1
    branches: dict = {}
    fixed: dict = {}
    for comp in universe.components:
        codes = {}
        kind = None
        for i in pool:
            kc = _component_code(seq[i], comp, depth)
            if kc is not None:
                kind, codes[i] = kc
        if not codes:
            continue
        if len(codes) < len(pool):
            raise SemanticError(f"support pattern is not uniform on {comp.id}")
        if comp.kind == "annulus":
            pool, br = _descend_annulus(codes, kind, comp, m, tail_from)
        else:
            pool, br = _descend(codes, kind, comp, m, depth, tail_from)
        if br.kind == "bounded":
            fixed[comp.id] = codes[pool[-1]]
        else:
            branches[comp.id] = (br, _exact_point(seq, pool, comp, br))
    if not branches:
        raise InsufficientDepth("every component stays bounded")
    provisional = WeightedLamination(tuple(
        Term(cid, Fraction(1, len(branches)), exact or _branch_point(universe[cid], br))
        for cid, (br, exact) in branches.items()))
    slots = _slots(provisional, universe, depth)
    # the descent fixed the limit points; any pattern entry moving toward them
    # (and sitting on the same bounded coordinates) may stay
    cand = [i for i in full
            if all(_component_code(seq[i], universe[c], depth)[1] == code for c, code in fixed.items())]
    stats = {i: _stats(seq[i], slots, universe, depth) for i in set(cand) | set(pool)}
    chosen = _thin([stats[i] for i in cand], cand, slots)
    if len(chosen) <= window:
        raise InsufficientDepth("too few entries move toward the candidate limit")
    weights = _increment_weights(stats[pool[len(pool) // 2]], stats[pool[-1]])
    # weights within tolerance of zero are indistinguishable from zero
    keep = [(s, w) for s, w in zip(slots, weights) if w > tol]
    if not keep:
        raise InsufficientDepth("no component keeps positive weight")
    total = sum(w for _, w in keep)
    ws = _snap_all([w / total for _, w in keep], tol)
    limit = WeightedLamination(tuple(Term(s.comp.id, w, s.point) for (s, _), w in zip(keep, ws)))
    sub = [seq[i] for i in chosen]
    rep = converge_in_X(sub, limit, universe, tol, window, depth)
    if not rep:
        raise InsufficientDepth("extracted candidate fails the convergence check: " + "; ".join(rep.notes))
    return ExtractedLimit(tuple(chosen), limit)


def _increment_weights(early: _Stats, late: _Stats) -> list[Fraction]:
    # gauge growth between two tail entries; bounded offsets cancel
    inc = [max(0, b - a) for a, b in zip(early.gauge, late.gauge)]
    d = sum(inc)
    if d == 0:
        return late.effective()
    return [b + late.interior * Fraction(g, d) for b, g in zip(late.boundary, inc)]


def _progress(s: _Stats, i: int):
    vals = [v for v in (s.bprog[i], s.prog[i]) if v is not None]
    return max(vals) if vals else None


def _thin(stats: list[_Stats], idx: list[int], slots: list[_Slot]) -> list[int]:
    """Greedy subsequence along which every slot's progress strictly grows
    (or stays saturated)."""
    out, prev = [], None
    for s, i in zip(stats, idx):
        cur = [_progress(s, k) for k in range(len(slots))]
        if prev is None:
            ok = True
        else:
            ok = True
            for k, slot in enumerate(slots):
                a, b = prev[k], cur[k]
                if a is None or b is None:
                    continue
                if b >= slot.cap and a >= slot.cap:
                    continue
                if not b > a:
                    ok = False
                    break
        if ok:
            out.append(i)
            prev = cur
    return out


# -- neighbourhoods -----------------------------------------------------------

def w_membership(X: ProductPoint, xi: WeightedLamination, j: int, delta, universe: Universe,
                 depth: int = 40) -> bool:
    """Membership of a product point in the basic neighbourhood W(xi, j, delta).

    (1) every target gauge is at least j; (2) gauge ratios to the first
    target lie in [(1-delta) a_i/a_1, (1+delta) a_i/a_1]; (3) gauges on the
    other components sum to less than delta times the first gauge;
    (4) every coordinate is within 2^-j of its target point in the visual
    metric from the basepoint (for curve and end targets: correct side).
    """
    delta = Fraction(delta)
    slots = _slots(xi, universe, depth)
    gauges, progs = [], []
    for slot in slots:
        v = X.get(slot.comp.id)
        pr = _projection(slot, v, depth) if v is not None else None
        if pr is None:
            return False
        gauges.append(pr[0])
        progs.append(pr[1])
    if min(gauges) < j:
        return False
    a1, g1 = slots[0].weight, gauges[0]
    for slot, g in zip(slots[1:], gauges[1:]):
        r = slot.weight / a1
        if not (1 - delta) * r <= Fraction(g, g1) <= (1 + delta) * r:
            return False
    targets = {s.comp.id for s in slots}
    rest = sum(complement_gauge(universe[c], X.get(c)) for c in X.components if c not in targets)
    if not rest < delta * g1:
        return False
    for slot, pr in zip(slots, progs):
        if slot.kind == "fill":
            if pr < min(j, slot.cap):
                return False
        elif pr <= 0:
            return False
    return True


def monotone_envelope(samples: Sequence[tuple]) -> list[tuple]:
    """Least non-decreasing majorant on the sample times (a running max)."""
    out = []
    best = None
    prev_t = None
    for t, v in samples:
        if v < 0:
            raise SemanticError("values must be non-negative")
        if prev_t is not None and not t > prev_t:
            raise SemanticError("times must be strictly increasing")
        prev_t = t
        best = v if best is None else max(best, v)
        out.append((t, best))
    return out


# -- componentwise action -----------------------------------------------------

def act_point(g, comp: ComponentSpace, point):
    """Apply a component's mapping class (farey) or twist shift (annulus)."""
    if comp.kind == "annulus":
        return point + g if isinstance(point, int) else point
    if isinstance(point, Slope):
        return act_slope(g, point)
    return act_boundary(g, point)


def act_componentwise(phi: Mapping[str, object], xi: WeightedLamination, universe: Universe) -> WeightedLamination:
    terms = []
    for t in xi.terms:
        if t.component == CROSSING:
            coords = {}
            for cid, v in t.point.coords:
                comp = universe[cid]
                if comp.kind == "annulus" and isinstance(v, Slope):
                    v = _annulus_value(comp, v)
                coords[cid] = act_point(phi[cid], comp, v) if cid in phi else v
            terms.append(Term(CROSSING, t.weight, ProductPoint(coords)))
        elif t.component in phi:
            terms.append(Term(t.component, t.weight, act_point(phi[t.component], universe[t.component], t.point)))
        else:
            terms.append(t)
    return WeightedLamination(tuple(terms))


def agree_to_depth(x, y, depth: int) -> bool:
    """Equality of two boundary points as far as ``depth`` quotients certify."""
    if isinstance(x, OrientedCurve) or isinstance(y, OrientedCurve):
        return x == y
    n = int(min(depth, x.available_depth, y.available_depth))
    return x.quotients(n) == y.quotients(n)


def same_limit(a: WeightedLamination, b: WeightedLamination, depth: int) -> bool:
    if {t.component for t in a.terms} != {t.component for t in b.terms}:
        return False
    for t in a.terms:
        u = b.term(t.component)
        if u.weight != t.weight or not agree_to_depth(t.point, u.point, depth):
            return False
    return True


def is_fixed(phi: Mapping[str, object], xi: WeightedLamination, universe: Universe, depth: int = 40) -> bool:
    """Whether the componentwise action fixes xi, as far as depth certifies."""
    image = act_componentwise(phi, xi, universe)
    for t in xi.terms:
        u = image.term(t.component)
        if u is None or u.weight != t.weight:
            return False
        if t.component == CROSSING:
            if u.point != t.point:
                return False
        elif not agree_to_depth(t.point, u.point, depth):
            return False
    return True
