"""Complexity-one markings and the marking graph.

A marking (b, t) is an ordered pair of slopes meeting once.  Writing the
primitive vectors of b and t as the columns of a determinant-one matrix
identifies markings with PSL(2,Z): a twist of t about b is right
multiplication by T^{+-1}, and the swap (b, t) -> (t, b) is right
multiplication by S.  The marking graph is therefore the Cayley graph of
PSL(2,Z) for {T, T^-1, S}, and BFS distances reduce to word lengths.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Sequence, Union

from . import _kernels
from .action import MappingClass, act_slope, twist
from .boundary import twist_floor
from .errors import ParseError, SemanticError
from .slopes import (
    INFINITY,
    ZERO,
    Slope,
    farey_distance,
    farey_geodesic,
    intersection_number,
    ladder_vertices,
    mat_inverse,
    mat_mul,
)


@dataclass(frozen=True)
class Marking:
    base: Slope
    transversal: Slope

    def __post_init__(self):
        if intersection_number(self.base, self.transversal) != 1:
            raise SemanticError(f"{self.base} and {self.transversal} do not meet once")

    @classmethod
    def parse(cls, text: str) -> "Marking":
        parts = text.split(":")
        if len(parts) != 2:
            raise ParseError(f"marking must look like 'p/q:r/s', got {text!r}")
        b, t = Slope.parse(parts[0]), Slope.parse(parts[1])
        try:
            return cls(b, t)
        except SemanticError as exc:
            raise ParseError(str(exc)) from None

    @classmethod
    def from_matrix(cls, m: Sequence[int]) -> "Marking":
        a, b, c, d = m
        return cls(Slope.of(a, c), Slope.of(b, d))

    def matrix(self) -> MappingClass:
        b, t = self.base, self.transversal
        eps = 1 if b.p * t.q - b.q * t.p == 1 else -1
        return MappingClass(b.p, eps * t.p, b.q, eps * t.q)

    def twisted(self, k: int) -> "Marking":
        return Marking(self.base, act_slope(twist(self.base, k), self.transversal))

    def swapped(self) -> "Marking":
        return Marking(self.transversal, self.base)

    def __str__(self) -> str:
        return f"{self.base}:{self.transversal}"


STANDARD = Marking(INFINITY, ZERO)


@dataclass(frozen=True)
class Twist:
    k: int

    def __post_init__(self):
        if self.k == 0:
            raise SemanticError("twist count must be nonzero")

    def __str__(self) -> str:
        return f"T{self.k:+d}"


@dataclass(frozen=True)
class Swap:
    def __str__(self) -> str:
        return "S"


Move = Union[Twist, Swap]


@dataclass(frozen=True)
class MarkingPath:
    moves: tuple
    stage_twists: tuple = ()  # q(i) per vertex of the Farey geodesic, then the final twist

    def __len__(self) -> int:
        return sum(abs(m.k) if isinstance(m, Twist) else 1 for m in self.moves)

    def replay(self, start: Marking) -> list[Marking]:
        out = [start]
        for mv in self.moves:
            out.append(out[-1].twisted(mv.k) if isinstance(mv, Twist) else out[-1].swapped())
        return out

    def __str__(self) -> str:
        return " ".join(map(str, self.moves))


def elementary_moves(m: Marking) -> set[Marking]:
    return {m.twisted(1), m.twisted(-1), m.swapped()}


def marking_distance_bfs(m1: Marking, m2: Marking, cap: int = 40) -> int | None:
    """Exact marking-graph distance, or None when it exceeds ``cap``."""
    g = mat_mul(mat_inverse(m1.matrix().entries), m2.matrix().entries)
    d = _kernels.marking_bfs(g, cap)
    return None if d < 0 else d


def marking_ball(center: Marking, radius: int) -> dict[Marking, int]:
    """Plain BFS over elementary moves (oracle for small radii)."""
    dist = {center: 0}
    frontier = [center]
    for r in range(1, radius + 1):
        nxt = []
        for m in frontier:
            for w in elementary_moves(m):
                if w not in dist:
                    dist[w] = r
                    nxt.append(w)
        frontier = nxt
    return dist


def _twist_count(target: Slope, current: Slope, about: Slope) -> int:
    return twist_floor(target, about) - twist_floor(current, about)


def mm_path(m1: Marking, m2: Marking) -> MarkingPath:
    """Path along a Farey geodesic between the bases: at each vertex twist the
    transversal onto the next vertex, then swap; finish with a twist."""
    moves: list = []
    counts = []
    eta = farey_geodesic(m1.base, m2.base)
    t = m1.transversal
    for here, nxt in zip(eta, eta[1:]):
        k = _twist_count(nxt, t, here)
        counts.append(abs(k))
        if k:
            moves.append(Twist(k))
        moves.append(Swap())
        t = here
    k = _twist_count(m2.transversal, t, m2.base)
    counts.append(abs(k))
    if k:
        moves.append(Twist(k))
    return MarkingPath(tuple(moves), tuple(counts))


WHOLE_SURFACE = "S"

# corpus constants: mm_path length <= PATH_FACTOR * BFS distance, and
# max_projection_gap >= sqrt(distance / GAP_CONSTANT)
PATH_FACTOR = 2
GAP_CONSTANT = 2


def projection_annuli(m1: Marking, m2: Marking) -> list[Slope]:
    """Cores considered by max_projection_gap: ladder vertices between the
    bases plus the four marking curves."""
    cores = set(ladder_vertices(m1.base, m2.base)) if m1.base != m2.base else set()
    cores.update((m1.base, m1.transversal, m2.base, m2.transversal))
    return sorted(cores)


def annular_diameter(m1: Marking, m2: Marking, core: Slope) -> int:
    curves = {m1.base, m1.transversal, m2.base, m2.transversal} - {core}
    tw = [twist_floor(c, core) for c in curves]
    return max(tw) - min(tw)


def max_projection_gap(m1: Marking, m2: Marking) -> tuple[Union[str, Slope], int]:
    best: tuple = (WHOLE_SURFACE, farey_distance(m1.base, m2.base))
    for core in projection_annuli(m1, m2):
        d = annular_diameter(m1, m2, core)
        if d > best[1]:
            best = (core, d)
    return best


# -- corpus -----------------------------------------------------------------

GENERATORS = (MappingClass(1, 1, 0, 1), MappingClass(1, 0, -1, 1))


def random_word(rng: random.Random, length: int, max_exp: int) -> MappingClass:
    out = MappingClass(1, 0, 0, 1)
    for i in range(length):
        e = rng.randint(1, max_exp) * rng.choice((1, -1))
        out = out @ (GENERATORS[i % 2] ** e)
    return out


def marking_corpus(seed: int, size: int, max_distance: int = 40) -> list[tuple[Marking, Marking, int]]:
    """Seeded pairs (m1, m2, BFS distance) built from words in the two
    standard twists; pairs beyond ``max_distance`` are redrawn."""
    rng = random.Random(seed)
    out = []
    while len(out) < size:
        g1 = random_word(rng, rng.randint(0, 6), 4)
        h = random_word(rng, rng.randint(1, 8), 5)
        m1 = Marking.from_matrix(g1.entries)
        m2 = Marking.from_matrix((g1 @ h).entries)
        d = marking_distance_bfs(m1, m2, max_distance)
        if d is not None:
            out.append((m1, m2, d))
    return out


def parse_moves(text: str) -> tuple:
    moves = []
    for tok in text.split():
        if tok == "S":
            moves.append(Swap())
        elif re.fullmatch(r"T[+-]\d+", tok):
            moves.append(Twist(int(tok[1:])))
        else:
            raise ParseError(f"unknown move {tok!r}")
    return tuple(moves)


def act_marking(g: MappingClass, m: Marking) -> Marking:
    return Marking(act_slope(g, m.base), act_slope(g, m.transversal))
