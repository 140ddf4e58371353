"""Slopes on the once-punctured torus and the Farey graph they span.

A slope p/q is a vertex; two slopes are joined by an edge when they meet
once, i.e. |ps - qr| = 1.  Distances are computed on the ladder of Farey
triangles crossed by the hyperbolic geodesic between the two endpoints,
after moving the source to 1/0 with a canonical normalizing matrix.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterator, Sequence

from . import _kernels
from .errors import ParseError, SemanticError

Matrix = tuple  # (a, b, c, d) for [[a, b], [c, d]]


@dataclass(frozen=True, order=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if not isinstance(p, int) or not isinstance(q, int):
            raise SemanticError(f"slope entries must be integers: {p!r}/{q!r}")
        if q < 0:
            raise SemanticError(f"slope {p}/{q} is not canonical (q < 0)")
        if q == 0 and p != 1:
            raise SemanticError(f"infinity must be written 1/0, got {p}/0")
        if gcd(p, q) != 1:
            raise SemanticError(f"slope {p}/{q} is not reduced")

    @classmethod
    def of(cls, p: int, q: int) -> "Slope":
        """Reduce and canonicalize an arbitrary nonzero pair."""
        if p == 0 and q == 0:
            raise SemanticError("0/0 is not a slope")
        g = gcd(p, q)
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def from_fraction(cls, x: Fraction | int) -> "Slope":
        x = Fraction(x)
        return cls(x.numerator, x.denominator)

    @classmethod
    def parse(cls, text: str) -> "Slope":
        m = re.fullmatch(r"\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*", text)
        if not m:
            raise ParseError(f"cannot parse slope {text!r}")
        p = int(m.group(1))
        q = int(m.group(2)) if m.group(2) is not None else 1
        if q == 0 and p != 1:
            raise ParseError(f"infinity must be written 1/0, got {text!r}")
        if gcd(p, q) != 1:
            raise ParseError(f"slope {text!r} is not reduced")
        return cls(p, q)

    @property
    def is_infinite(self) -> bool:
        return self.q == 0

    def to_fraction(self) -> Fraction:
        if self.q == 0:
            raise SemanticError("1/0 has no rational value")
        return Fraction(self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


INFINITY = Slope(1, 0)
ZERO = Slope(0, 1)


@dataclass(frozen=True)
class ContinuedFraction:
    integer_part: int
    partial_quotients: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "partial_quotients", tuple(self.partial_quotients))
        if any(a < 1 for a in self.partial_quotients):
            raise SemanticError("partial quotients must be positive")
        if self.partial_quotients and self.partial_quotients[-1] < 2:
            raise SemanticError("last partial quotient must be at least 2")

    def convergents(self) -> Iterator[Slope]:
        h0, h1 = 1, self.integer_part
        k0, k1 = 0, 1
        yield Slope(h1, k1)
        for a in self.partial_quotients:
            h0, h1 = h1, a * h1 + h0
            k0, k1 = k1, a * k1 + k0
            yield Slope.of(h1, k1)

    def value(self) -> Slope:
        *_, last = self.convergents()
        return last

    @classmethod
    def parse(cls, text: str) -> "ContinuedFraction":
        m = re.fullmatch(r"\s*\[\s*([+-]?\d+)\s*(?:;\s*(\d+(?:\s*,\s*\d+)*)\s*)?\]\s*", text)
        if not m:
            raise ParseError(f"cannot parse continued fraction {text!r}")
        tail = tuple(int(t) for t in m.group(2).split(",")) if m.group(2) else ()
        try:
            return cls(int(m.group(1)), tail)
        except SemanticError as exc:
            raise ParseError(str(exc)) from None

    def __str__(self) -> str:
        if not self.partial_quotients:
            return f"[{self.integer_part}]"
        return f"[{self.integer_part};{','.join(map(str, self.partial_quotients))}]"


def cf_quotients(p: int, q: int) -> list[int]:
    """Euclidean quotients of p/q (q > 0); the last is >= 2 unless it is the only one."""
    out = []
    while q:
        a, r = divmod(p, q)
        out.append(a)
        p, q = q, r
    return out


def continued_fraction(a: Slope) -> ContinuedFraction:
    if a.is_infinite:
        raise SemanticError("1/0 has no continued fraction (it is the empty code)")
    qs = cf_quotients(a.p, a.q)
    return ContinuedFraction(qs[0], tuple(qs[1:]))


def intersection_number(a: Slope, b: Slope) -> int:
    return abs(a.p * b.q - a.q * b.p)


def is_edge(a: Slope, b: Slope) -> bool:
    return intersection_number(a, b) == 1


# -- normalization ---------------------------------------------------------

def normalizer(a: Slope) -> Matrix:
    """Canonical determinant-one matrix sending a to 1/0."""
    return _kernels._pycore.normalizer_entries(a.p, a.q)


def mat_inverse(m: Matrix) -> Matrix:
    a, b, c, d = m
    return d, -b, -c, a


def mat_mul(m: Matrix, n: Matrix) -> Matrix:
    a, b, c, d = m
    e, f, g, h = n
    return a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h


def apply(m: Matrix, s: Slope) -> Slope:
    a, b, c, d = m
    return Slope.of(a * s.p + b * s.q, c * s.p + d * s.q)


# -- ladder ----------------------------------------------------------------

@dataclass(frozen=True)
class PivotSequence:
    triangles: tuple

    def vertices(self) -> set:
        return {v for t in self.triangles for v in t}

    def __len__(self) -> int:
        return len(self.triangles)


def _normalized_target(a: Slope, b: Slope) -> tuple[Matrix, int, list[int]]:
    n = normalizer(a)
    x, y = _kernels._pycore.normalize_pair(a.p, a.q, b.p, b.q)
    qs = cf_quotients(x, y)
    return n, qs[0], qs[1:]


def _moves(tail: Sequence[int]) -> list[int]:
    # run lengths of alternating L/R Stern-Brocot moves, starting with L
    runs = list(tail)
    runs[0] -= 1
    runs[-1] -= 1
    return runs


def pivot_sequence(a: Slope, b: Slope) -> PivotSequence:
    """Farey triangles crossed by the geodesic from a to b, in order.

    Adjacent slopes give an empty sequence.  The length is the sum of the
    partial quotients of the normalized target minus one, so this is meant
    for moderate inputs; distances never materialize it.
    """
    if a == b:
        raise SemanticError("pivot sequence needs distinct slopes")
    n, a0, tail = _normalized_target(a, b)
    if not tail:
        return PivotSequence(())
    back = mat_inverse(n)
    left, right = (a0, 1), (a0 + 1, 1)
    tris = [((1, 0), left, right)]
    move_left = True
    for k in _moves(tail):
        for _ in range(k):
            m = (left[0] + right[0], left[1] + right[1])
            tris.append((left, right, m))
            if move_left:
                right = m
            else:
                left = m
        move_left = not move_left
    tris.append((left, right, (left[0] + right[0], left[1] + right[1])))
    return PivotSequence(tuple(tuple(apply(back, Slope.of(*v)) for v in t) for t in tris))


def ladder_vertices(a: Slope, b: Slope, keep: int = 2) -> list[Slope]:
    """Vertices of the pivot sequence, keeping only the first and last
    ``keep`` mediants of each run of identical moves."""
    if a == b:
        raise SemanticError("ladder needs distinct slopes")
    n, a0, tail = _normalized_target(a, b)
    back = mat_inverse(n)
    pts = [(1, 0), (a0, 1), (a0 + 1, 1)]
    if tail:
        left, right = (a0, 1), (a0 + 1, 1)
        move_left = True
        for k in _moves(tail):
            pivot = left if move_left else right
            start = right if move_left else left
            for j in sorted({j for j in range(1, k + 1) if j <= keep or j > k - keep}):
                pts.append((j * pivot[0] + start[0], j * pivot[1] + start[1]))
            if k:
                end = (k * pivot[0] + start[0], k * pivot[1] + start[1])
                if move_left:
                    right = end
                else:
                    left = end
            move_left = not move_left
        pts.append((left[0] + right[0], left[1] + right[1]))
    else:
        pts = [(1, 0), (a0, 1)]
    return [apply(back, Slope.of(*v)) for v in pts]


def farey_distance(a: Slope, b: Slope) -> int:
    return _kernels.pair_distance(a.p, a.q, b.p, b.q)


def farey_geodesic(a: Slope, b: Slope) -> list[Slope]:
    """A shortest edge path from a to b through the pivot vertices."""
    if a == b:
        return [a]
    n, a0, tail = _normalized_target(a, b)
    back = mat_inverse(n)
    if not tail:
        return [a, b]
    # each entry: (vertex, distance, parent entry)
    root = ((1, 0), 0, None)
    left = ((a0, 1), 1, root)
    right = ((a0 + 1, 1), 1, root)

    def step(left, right, base):
        near = left if left[1] <= right[1] else right
        v = (left[0][0] + right[0][0], left[0][1] + right[0][1]) if base is None else base
        return (v, near[1] + 1, near)

    move_left = True
    for k in _moves(tail):
        if k:
            pivot, start = (left, right) if move_left else (right, left)
            moved = start
            for _ in range(min(k, 2)):
                moved = step(pivot, moved, None)
            if k > 2:
                v = (k * pivot[0][0] + start[0][0], k * pivot[0][1] + start[0][1])
                moved = (v, pivot[1] + 1, pivot)
            if move_left:
                right = moved
            else:
                left = moved
        move_left = not move_left
    node = step(left, right, None)
    path = []
    while node is not None:
        path.append(apply(back, Slope.of(*node[0])))
        node = node[2]
    path.reverse()
    return path


# -- brute-force oracle ----------------------------------------------------

def oracle_height(*slopes: Slope) -> int:
    """Default BFS region height: eight times the largest input entry."""
    return 8 * max([1] + [max(abs(s.p), s.q) for s in slopes])


def bfs_distances(source: Slope, targets: Sequence[Slope], height: int) -> list[int | None]:
    """Graph distances inside {p/q : |p|, q <= height} plus 1/0."""
    raw = _kernels.farey_bfs(source.p, source.q, height, [(t.p, t.q) for t in targets])
    return [None if d < 0 else d for d in raw]


def farey_distance_bfs(a: Slope, b: Slope, height: int | None = None, max_doublings: int = 6) -> int:
    """Brute-force distance, doubling the region until the answer is stable."""
    h = height or oracle_height(a, b)
    prev = bfs_distances(a, [b], h)[0]
    for _ in range(max_doublings):
        h *= 2
        cur = bfs_distances(a, [b], h)[0]
        if cur is not None and cur == prev:
            return cur
        prev = cur
    raise SemanticError(f"BFS oracle for {a}, {b} did not stabilize")


def slopes_in_unit_interval(max_q: int) -> list[Slope]:
    """All slopes in [0, 1] with denominator <= max_q, plus 1/0."""
    out = [Slope(p, q) for q in range(1, max_q + 1) for p in range(q + 1) if gcd(p, q) == 1]
    return out + [INFINITY]



def oracle_row(a: Slope, targets: Sequence[Slope], height: int, stable_check: bool = True) -> list[int]:
    """BFS distances from a to each target; with ``stable_check`` the region
    is doubled once and the answers must not change."""
    bfs = bfs_distances(a, targets, height)
    if None in bfs or (stable_check and bfs_distances(a, targets, 2 * height) != bfs):
        raise SemanticError(f"BFS region of height {height} too small for source {a}")
    return bfs


def oracle_sweep(slopes: Sequence[Slope], stable_check: bool = True) -> Iterator[tuple[Slope, Slope, int, int]]:
    """(a, b, ladder distance, BFS distance) for every pair a before b."""
    h = oracle_height(*slopes)
    for i, a in enumerate(slopes):
        rest = slopes[i + 1:]
        if rest:
            for b, d in zip(rest, oracle_row(a, rest, h, stable_check)):
                yield a, b, farey_distance(a, b), d
