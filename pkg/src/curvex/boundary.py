"""Boundary points of the Farey graph and the doubled-rational Cantor set.

Three kinds of point:

* ``OrientedCurve(c, sign)``: the two points c+ and c- replacing a rational c.
  c+ is the limit of T_c^n(x) for n -> +oo, where T_c is the left twist about c.
* ``QuadraticIrrational``: an eventually periodic continued fraction, exact.
* ``PrefixStream``: a continued-fraction prefix with an optional replayable
  supplier of further quotients.

Gromov products are evaluated on depth-n approximating slopes.  All CF codes
here are lists ``[a0, a1, ...]`` with a0 the integer part.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Sequence, Union

from . import _kernels
from .errors import IndistinguishableAtDepth, InsufficientDepth, ParseError, SemanticError
from .slopes import INFINITY, Slope, cf_quotients, mat_inverse, normalizer

__all__ = [
    "OrientedCurve",
    "QuadraticIrrational",
    "PrefixStream",
    "BoundaryPoint",
    "GromovProductEstimate",
    "gromov_product",
    "visual_distance",
    "converges_to",
    "product_series",
    "point_to_json",
    "point_from_json",
]


def _convergent(qs: Sequence[int]) -> Slope:
    h0, h1, k0, k1 = 0, 1, 1, 0
    for a in qs:
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
    return Slope.of(h1, k1)


def _check_code(qs: Sequence[int], first_free: bool = True) -> None:
    start = 1 if first_free else 0
    if any(a < 1 for a in qs[start:]):
        raise SemanticError(f"partial quotients must be positive: {list(qs)}")


def twist_floor(s: Slope, about: Slope) -> int:
    """floor of the image of s under the canonical normalizer of ``about``."""
    if s == about:
        raise SemanticError(f"twist coordinate of {about} about itself")
    x, y = _kernels._pycore.normalize_pair(about.p, about.q, s.p, s.q)
    return x // y


@dataclass(frozen=True)
class OrientedCurve:
    slope: Slope
    sign: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise SemanticError(f"sign must be +1 or -1, got {self.sign!r}")

    def approximant(self, n: int) -> Slope:
        # T_c^{sign*n} applied to the normalizer preimage of 0/1
        a, b, c, d = mat_inverse(normalizer(self.slope))
        k = self.sign * n
        return Slope.of(a * k + b, c * k + d)

    @property
    def available_depth(self) -> float:
        return float("inf")

    def __str__(self) -> str:
        return f"{self.slope}{'+' if self.sign > 0 else '-'}"


# -- quadratic surds (P + sqrt(D)) / Q --------------------------------------

def _surd_floor(P: int, D: int, Q: int) -> int:
    s = isqrt(D)
    return (P + s) // Q if Q > 0 else (P + s + 1) // Q


def _surd_normal(P: int, D: int, Q: int) -> tuple[int, int, int]:
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    return P, D, Q


def surd_to_cf(P: int, D: int, Q: int) -> tuple[tuple, tuple]:
    """(preperiod, period) of the continued fraction of (P + sqrt D)/Q."""
    if isqrt(D) ** 2 == D:
        raise SemanticError("surd is rational")
    P, D, Q = _surd_normal(P, D, Q)
    seen: dict = {}
    out = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(out)
        a = _surd_floor(P, D, Q)
        out.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    i = seen[(P, Q)]
    return tuple(out[:i]), tuple(out[i:])


def cf_to_surd(pre: Sequence[int], per: Sequence[int]) -> tuple[int, int, int]:
    p0, p1, q0, q1 = 0, 1, 1, 0
    for b in per:
        p0, p1 = p1, b * p1 + p0
        q0, q1 = q1, b * q1 + q0
    # y = [per; y] solves q1 y^2 + (q0 - p1) y - p0 = 0, positive root
    tr = p1 + q0
    det = p1 * q0 - p0 * q1
    y = (p1 - q0, tr * tr - 4 * det, 2 * q1)
    m = (1, 0, 0, 1)
    for a in pre:
        m = (m[0] * a + m[1], m[0], m[2] * a + m[3], m[2])
    return surd_mobius(m, *y)


def surd_mobius(m: Sequence[int], P: int, D: int, Q: int) -> tuple[int, int, int]:
    """Image of (P + sqrt D)/Q under z -> (az + b)/(cz + d)."""
    a, b, c, d = m
    u, v = a * P + b * Q, c * P + d * Q
    x = u * v - a * c * D
    y = Q * (a * d - b * c)
    z = v * v - c * c * D
    if y < 0:
        x, y, z = -x, -y, -z
    g = gcd(gcd(x, y), z)
    x, y, z = x // g, y // g, z // g
    return x, D * y * y, z


def _primitive(word: tuple) -> tuple:
    n = len(word)
    for k in range(1, n + 1):
        if n % k == 0 and word[:k] * (n // k) == word:
            return word[:k]
    return word


@dataclass(frozen=True)
class QuadraticIrrational:
    """Eventually periodic CF [pre; per, per, ...], stored canonically."""

    preperiod: tuple
    period: tuple

    def __post_init__(self):
        pre, per = tuple(self.preperiod), tuple(self.period)
        if not per:
            raise SemanticError("period must be non-empty")
        if any(a < 1 for a in per):
            raise SemanticError("period quotients must be positive")
        _check_code(pre)
        per = _primitive(per)
        while pre and pre[-1] == per[-1]:
            per = per[-1:] + per[:-1]
            pre = pre[:-1]
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    def quotient(self, i: int) -> int:
        if i < len(self.preperiod):
            return self.preperiod[i]
        return self.period[(i - len(self.preperiod)) % len(self.period)]

    def quotients(self, n: int) -> list[int]:
        return [self.quotient(i) for i in range(n)]

    def approximant(self, n: int) -> Slope:
        return _convergent(self.quotients(max(n, 1)))

    @property
    def available_depth(self) -> float:
        return float("inf")

    def surd(self) -> tuple[int, int, int]:
        return cf_to_surd(self.preperiod, self.period)

    @classmethod
    def from_surd(cls, P: int, D: int, Q: int) -> "QuadraticIrrational":
        return cls(*surd_to_cf(P, D, Q))

    def __float__(self) -> float:
        P, D, Q = self.surd()
        return (P + D ** 0.5) / Q

    def __str__(self) -> str:
        per = "(" + ",".join(map(str, self.period)) + ")"
        if not self.preperiod:
            return f"[{per}]"
        rest = ",".join([str(a) for a in self.preperiod[1:]] + [per])
        return f"[{self.preperiod[0]};{rest}]"


@dataclass(frozen=True)
class PrefixStream:
    """A CF prefix plus an optional replayable supplier.

    ``extend(n)`` must return the first n quotients (n >= len(prefix)) and
    always agree with ``prefix``; it may raise InsufficientDepth.
    """

    prefix: tuple
    extend: Callable[[int], Sequence[int]] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if not self.prefix:
            raise SemanticError("prefix must be non-empty")
        _check_code(self.prefix)

    def quotients(self, n: int) -> list[int]:
        if n <= len(self.prefix):
            return list(self.prefix[:n])
        if self.extend is None:
            raise InsufficientDepth(f"prefix has {len(self.prefix)} quotients, {n} requested")
        out = list(self.extend(n))[:n]
        if len(out) < n:
            raise InsufficientDepth(f"supplier produced {len(out)} of {n} quotients")
        if tuple(out[: len(self.prefix)]) != self.prefix:
            raise SemanticError("supplier contradicts the stored prefix")
        return out

    def approximant(self, n: int) -> Slope:
        return _convergent(self.quotients(max(n, 1)))

    @property
    def available_depth(self) -> float:
        return float("inf") if self.extend is not None else len(self.prefix)

    def extended(self, n: int) -> "PrefixStream":
        """Same point with the first n quotients materialized."""
        if n <= len(self.prefix):
            return self
        return PrefixStream(tuple(self.quotients(n)), self.extend)

    def __str__(self) -> str:
        return "[" + str(self.prefix[0]) + ";" + ",".join(map(str, self.prefix[1:])) + ",...]"


BoundaryPoint = Union[OrientedCurve, QuadraticIrrational, PrefixStream]
Point = Union[BoundaryPoint, Slope]


# -- Gromov products --------------------------------------------------------

@dataclass(frozen=True)
class GromovProductEstimate:
    lower: int
    exact: bool


def _approx(x: Point, n: int) -> Slope:
    return x if isinstance(x, Slope) else x.approximant(n)


def _dist(a: Slope, b: Slope) -> int:
    return _kernels.pair_distance(a.p, a.q, b.p, b.q)


def _product_slopes(x: Slope, y: Slope, base: Slope) -> int:
    return (_dist(base, x) + _dist(base, y) - _dist(x, y)) // 2


def _depth_of(x: Point) -> float:
    return float("inf") if isinstance(x, Slope) else x.available_depth


def gromov_product(x: Point, y: Point, base: Slope = INFINITY, depth: int = 12) -> GromovProductEstimate:
    """Floor of the Gromov product on depth-truncated approximants.

    The value at depth n is the least floored product over approximants of
    depth n-1 and n.  ``exact`` is set when depths depth-2..depth agree.
    Raises IndistinguishableAtDepth when the approximants coincide.
    """
    if depth < 1:
        raise SemanticError("depth must be positive")
    if isinstance(x, Slope) and isinstance(y, Slope):
        if x == y:
            raise IndistinguishableAtDepth(f"{x} and {y} coincide")
        return GromovProductEstimate(_product_slopes(x, y, base), True)
    if depth > min(_depth_of(x), _depth_of(y)):
        raise InsufficientDepth(f"depth {depth} exceeds the data available")
    if _approx(x, depth) == _approx(y, depth):
        raise IndistinguishableAtDepth(f"{x} and {y} agree through depth {depth}")
    values = [_block_product(x, y, base, n) for n in range(max(1, depth - 2), depth + 1)]
    values = [v for v in values if v is not None]
    stable = len(values) == 3 and values[0] == values[1] == values[2]
    return GromovProductEstimate(values[-1], stable)


def _block_product(x: Point, y: Point, base: Slope, n: int) -> int | None:
    # min over depths {n-1, n} on both sides; this removes the parity
    # flicker of floored products along two diverging convergent sequences
    best = None
    for i in {max(1, n - 1), n}:
        xi = _approx(x, i)
        for j in {max(1, n - 1), n}:
            yj = _approx(y, j)
            if xi != yj:
                v = _product_slopes(xi, yj, base)
                best = v if best is None else min(best, v)
    return best


def visual_distance(x: Point, y: Point, base: Slope = INFINITY, depth: int = 12) -> Fraction:
    if x == y:
        return Fraction(0)
    return Fraction(1, 2 ** gromov_product(x, y, base, depth).lower)


def _settled_product(s: Slope, target: BoundaryPoint, base: Slope, margin: int = 4) -> int:
    # deepen until three consecutive depths agree or the target runs out
    cap = target.available_depth
    n = len(cf_quotients(s.p, s.q)) if not s.is_infinite else 1
    depth = n + margin
    while True:
        d = int(min(depth, cap))
        try:
            est = gromov_product(s, target, base, d)
        except IndistinguishableAtDepth:
            est = GromovProductEstimate(_dist(base, s), False)
        if est.exact or d >= cap:
            return est.lower
        depth *= 2
        if depth > 4096:
            return est.lower


def resolution_cap(target: BoundaryPoint, base: Slope = INFINITY, slack: int = 2) -> float:
    """Largest product that finite target data can certify (inf if unbounded)."""
    cap = target.available_depth
    if cap == float("inf"):
        return cap
    return max(0, _dist(base, target.approximant(int(cap))) - slack)


def product_series(seq: Sequence[Slope], target: BoundaryPoint, base: Slope = INFINITY) -> list[int]:
    """Per-entry progress toward ``target``.

    For an oriented curve c+ / c- this is the signed twist coordinate about c
    (the two points differ only in twist direction); otherwise the settled
    Gromov product with the target.
    """
    if isinstance(target, OrientedCurve):
        big = -(1 << 62)
        return [big if s == target.slope else target.sign * twist_floor(s, target.slope) for s in seq]
    return [_settled_product(s, target, base) for s in seq]


def window_progress(values: Sequence, window: int, cap: float = float("inf")) -> bool:
    """Every value is strictly exceeded by everything ``window`` or more steps later.

    Values at or above ``cap`` count as saturated; the last value must reach
    the cap when it is finite.
    """
    if window < 1:
        raise SemanticError("window must be positive")
    n = len(values)
    if n <= window:
        return False
    vals = [min(v, cap) for v in values]
    tail_min = [0] * n
    m = float("inf")
    for i in range(n - 1, -1, -1):
        m = min(m, vals[i])
        tail_min[i] = m
    for i in range(n - window):
        if vals[i] >= cap:
            continue
        if tail_min[i + window] <= vals[i]:
            return False
    return cap == float("inf") or vals[-1] >= cap


def converges_to(seq: Sequence[Slope], target: BoundaryPoint, window: int = 2, base: Slope = INFINITY) -> bool:
    if not seq:
        raise SemanticError("empty sequence")
    cap = float("inf") if isinstance(target, OrientedCurve) else resolution_cap(target, base)
    return window_progress(product_series(seq, target, base), window, cap)


# -- JSON -------------------------------------------------------------------

def point_to_json(x: BoundaryPoint) -> dict:
    if isinstance(x, OrientedCurve):
        return {"kind": "curve", "slope": str(x.slope), "sign": "+" if x.sign > 0 else "-"}
    if isinstance(x, QuadraticIrrational):
        return {"kind": "quad", "pre": list(x.preperiod), "per": list(x.period)}
    if isinstance(x, PrefixStream):
        return {"kind": "prefix", "cf": list(x.prefix)}
    raise SemanticError(f"not a boundary point: {x!r}")


def _int_list(obj, key) -> list[int]:
    v = obj.get(key)
    if not isinstance(v, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in v):
        raise ParseError(f"field {key!r} must be a list of integers")
    return v


def point_from_json(obj) -> BoundaryPoint:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("boundary point must be an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "curve":
            sign = obj.get("sign")
            if sign not in ("+", "-"):
                raise ParseError("sign must be '+' or '-'")
            return OrientedCurve(Slope.parse(str(obj.get("slope", ""))), 1 if sign == "+" else -1)
        if kind == "quad":
            return QuadraticIrrational(tuple(_int_list(obj, "pre")), tuple(_int_list(obj, "per")))
        if kind == "prefix":
            return PrefixStream(tuple(_int_list(obj, "cf")))
    except SemanticError as exc:
        raise ParseError(str(exc)) from None
    raise ParseError(f"unknown boundary point kind {kind!r}")
