"""Backend selection for the hot kernels.

The compiled ``_core`` is used when importable unless ``CURVEX_PURE=1``.
Inputs too large for int64 arithmetic are always routed to ``_pycore``.
"""
import os
from functools import lru_cache

from . import _pycore

try:
    if os.environ.get("CURVEX_PURE") == "1":
        raise ImportError("pure backend requested")
    from . import _core
except ImportError:
    _core = None

BACKEND = "compiled" if _core is not None else "pure"

# products of two entries must stay inside int64
_SMALL = 1 << 30


def _small(*xs) -> bool:
    return all(-_SMALL < x < _SMALL for x in xs)


def ladder_distance(quotients) -> int:
    if _core is not None and all(0 <= a < (1 << 62) for a in quotients):
        return _core.ladder_distance(quotients)
    return _pycore.ladder_distance(quotients)


def pair_distance(p1: int, q1: int, p2: int, q2: int) -> int:
    if _core is not None and _small(p1, q1, p2, q2):
        return _core.pair_distance(p1, q1, p2, q2)
    return _big_pair_distance(p1, q1, p2, q2)


@lru_cache(maxsize=1 << 16)
def _big_pair_distance(p1: int, q1: int, p2: int, q2: int) -> int:
    # big entries: Euclid in Python ints, the ladder walk compiled when quotients fit
    if p1 == p2 and q1 == q2:
        return 0
    x, y = _pycore.normalize_pair(p1, q1, p2, q2)
    return ladder_distance(_pycore._tail_quotients(x, y))


def pair_distances(p1: int, q1: int, targets) -> list:
    if _core is not None and _small(p1, q1) and all(_small(*t) for t in targets):
        return _core.pair_distances(p1, q1, targets)
    return _pycore.pair_distances(p1, q1, targets)


def farey_bfs(src_p: int, src_q: int, height: int, targets) -> list:
    if _core is not None and height < 20000:
        return _core.farey_bfs(src_p, src_q, height, list(targets))
    return _pycore.farey_bfs(src_p, src_q, height, targets)


def _fib(n: int) -> int:
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def marking_bfs(g, cap: int) -> int:
    # entries at radius r from g are bounded by max|g| * 2 * fib(r + 2)
    bound = max(abs(x) for x in g) + 1
    if _core is not None and bound * 2 * _fib(cap + 3) < (1 << 62):
        return _core.marking_bfs(tuple(g), cap)
    return _pycore.marking_bfs(g, cap)
