"""PSL(2,Z) acting on slopes, boundary points and twist coordinates.

Twist convention: the left twist about 1/0 is [[1,1],[0,1]] and counts +1;
the twist about any other slope c is its conjugate by the canonical
normalizer of c.  Twist coordinates are floors in the normalized frame, so
T_c^k shifts them by exactly k.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .boundary import (
    BoundaryPoint,
    OrientedCurve,
    PrefixStream,
    QuadraticIrrational,
    _settled_product,
    surd_mobius,
    twist_floor,
)
from .errors import InsufficientDepth, ParseError, SemanticError
from .slopes import INFINITY, Slope, apply, mat_inverse, mat_mul, normalizer


@dataclass(frozen=True)
class MappingClass:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if a * d - b * c != 1:
            raise SemanticError(f"determinant of {self.entries} is not 1")
        if a < 0 or (a == 0 and b < 0) or (a == 0 and b == 0 and c < 0):
            for k, v in zip("abcd", (-a, -b, -c, -d)):
                object.__setattr__(self, k, v)

    @classmethod
    def of(cls, m: Sequence[int]) -> "MappingClass":
        return cls(*m)

    @classmethod
    def parse(cls, text: str) -> "MappingClass":
        parts = re.split(r"[,\s]+", text.strip().strip("[]()"))
        try:
            vals = [int(x) for x in parts if x]
        except ValueError:
            raise ParseError(f"cannot parse matrix {text!r}") from None
        if len(vals) != 4:
            raise ParseError(f"matrix needs 4 entries, got {text!r}")
        try:
            return cls(*vals)
        except SemanticError as exc:
            raise ParseError(str(exc)) from None

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    @property
    def trace(self) -> int:
        return self.a + self.d

    def __matmul__(self, other: "MappingClass") -> "MappingClass":
        return MappingClass(*mat_mul(self.entries, other.entries))

    def inverse(self) -> "MappingClass":
        return MappingClass(*mat_inverse(self.entries))

    def __pow__(self, k: int) -> "MappingClass":
        base = self if k >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(k)):
            out = out @ base
        return out

    def __str__(self) -> str:
        return f"{self.a},{self.b},{self.c},{self.d}"


IDENTITY = MappingClass(1, 0, 0, 1)
TWIST = MappingClass(1, 1, 0, 1)
SWAP = MappingClass(0, -1, 1, 0)


@dataclass(frozen=True)
class NTClass:
    kind: str  # "finite-order" | "twist-reducible" | "pseudo-Anosov"
    fixed_slope: Slope | None = None
    attracting: QuadraticIrrational | None = None
    repelling: QuadraticIrrational | None = None


def act_slope(m: MappingClass, s: Slope) -> Slope:
    return apply(m.entries, s)


def classify(m: MappingClass) -> NTClass:
    t = abs(m.trace)
    if t < 2 or m == IDENTITY:
        return NTClass("finite-order")
    a, b, c, d = m.entries
    if t == 2:
        return NTClass("twist-reducible", fixed_slope=Slope.of(a - d, 2 * c) if c else INFINITY)
    disc = m.trace ** 2 - 4
    sgn = 1 if m.trace > 0 else -1
    # fixed points (a - d +- sqrt(disc)) / 2c; the attracting one has |cz + d| > 1
    att = QuadraticIrrational.from_surd(sgn * (a - d), disc, sgn * 2 * c)
    rep = QuadraticIrrational.from_surd(-sgn * (a - d), disc, -sgn * 2 * c)
    return NTClass("pseudo-Anosov", attracting=att, repelling=rep)


def twist(about: Slope, k: int = 1) -> MappingClass:
    """k-th power of the left Dehn twist about a slope."""
    n = normalizer(about)
    return MappingClass(*mat_mul(mat_inverse(n), mat_mul((1, k, 0, 1), n)))


def twist_coordinate(s: Slope, about: Slope, normalizer_: MappingClass | None = None) -> int:
    if normalizer_ is None:
        return twist_floor(s, about)
    if act_slope(normalizer_, about) != INFINITY:
        raise SemanticError(f"{normalizer_} does not send {about} to 1/0")
    if s == about:
        raise SemanticError(f"twist coordinate of {about} about itself")
    a, b, c, d = normalizer_.entries
    x, y = a * s.p + b * s.q, c * s.p + d * s.q
    if y < 0:
        x, y = -x, -y
    return x // y


def annular_projection_distance(x: Slope, y: Slope, about: Slope) -> int:
    return abs(twist_floor(x, about) - twist_floor(y, about))


# -- Moebius action on continued fractions -----------------------------------

def mobius_quotients(m: Sequence[int], qs: Sequence[int]) -> list[int]:
    """Certified leading CF quotients of m(x), where x is any irrational with
    CF prefix ``qs`` (homographic algorithm)."""
    A, B, C, D = m
    out = []
    for q in qs:
        A, B, C, D = A * q + B, A, C * q + D, C
        # the tail t of x lies in (1, oo); emit while the image interval
        # between (A+B)/(C+D) and A/C has a single floor
        while C and C + D and (C > 0) == (C + D > 0):
            n = A // C
            if n != (A + B) // (C + D):
                break
            out.append(n)
            A, B, C, D = C, D, A - n * C, B - n * D
    return out


def _act_prefix(m: MappingClass, x: PrefixStream) -> PrefixStream:
    ent = m.entries

    def extend(n: int) -> list[int]:
        k = max(len(x.prefix), 2)
        while True:
            out = mobius_quotients(ent, x.quotients(k))
            if len(out) >= n:
                return out[:n]
            k = 2 * k + 4

    head = mobius_quotients(ent, x.prefix)
    if not head:
        if x.extend is None:
            raise InsufficientDepth("prefix too short to certify any quotient of the image")
        head = extend(1)
    return PrefixStream(tuple(head), extend if x.extend is not None else None)


def act_boundary(m: MappingClass, x: BoundaryPoint, depth: int | None = None) -> BoundaryPoint:
    if isinstance(x, OrientedCurve):
        # twists conjugate to twists, so the direction label is preserved
        return OrientedCurve(act_slope(m, x.slope), x.sign)
    if isinstance(x, QuadraticIrrational):
        return QuadraticIrrational.from_surd(*surd_mobius(m.entries, *x.surd()))
    if isinstance(x, PrefixStream):
        out = _act_prefix(m, x)
        return out.extended(depth) if depth else out
    raise SemanticError(f"not a boundary point: {x!r}")


def north_south_report(m: MappingClass, seeds: Sequence[Slope], iters: int,
                       base: Slope = INFINITY) -> dict:
    """Gromov products of m^k(seed) with the attracting point, k = 0..iters."""
    nt = classify(m)
    if nt.kind != "pseudo-Anosov":
        raise SemanticError(f"{m} is {nt.kind}, not pseudo-Anosov")
    report = {}
    for seed in seeds:
        rows = []
        s = seed
        for k in range(iters + 1):
            rows.append({"iter": k, "slope": s, "product": _settled_product(s, nt.attracting, base)})
            s = act_slope(m, s)
        report[seed] = rows
    return report

