"""Pure-Python kernels.

These mirror ``_core.pyx`` function for function and are used when the
compiled extension is unavailable (or ``CURVEX_PURE=1``).  All integers are
Python ints, so these also serve the big-integer inputs that the compiled
kernels refuse.
"""
from collections import deque

__all__ = [
    "normalize_pair",
    "ladder_distance",
    "pair_distance",
    "pair_distances",
    "farey_bfs",
    "marking_bfs",
]


def normalizer_entries(r, s):
    """Entries of the canonical matrix sending the slope r/s to 1/0."""
    if s == 0:
        return 1, 0, 0, 1
    if s == 1:
        return 0, 1, -1, r
    alpha = pow(r, -1, s)
    beta = (1 - alpha * r) // s
    return alpha, beta, -s, r


def normalize_pair(p1, q1, p2, q2):
    """Image (X, Y) of p2/q2 under the normalizer of p1/q1, with Y >= 0."""
    a, b, c, d = normalizer_entries(p1, q1)
    x = a * p2 + b * q2
    y = c * p2 + d * q2
    if y < 0 or (y == 0 and x < 0):
        x, y = -x, -y
    return x, y


def _tail_quotients(x, y):
    # partial quotients after the integer part of x/y (y > 0)
    out = []
    x, y = y, x % y
    while y:
        a, r = divmod(x, y)
        out.append(a)
        x, y = y, r
    return out


def ladder_distance(quotients):
    """Farey distance from 1/0 to [a0; a1, ..., an] given (a1, ..., an).

    The ladder of triangles crossed by the vertical geodesic is walked as a
    Stern-Brocot descent; only the distances of the current edge endpoints
    are carried.  A run of k identical moves stabilises after two steps.
    """
    n = len(quotients)
    if n == 0:
        return 1
    runs = list(quotients)
    runs[0] -= 1
    runs[-1] -= 1
    d_left = d_right = 1
    move_left = True
    for k in runs:
        for _ in range(min(k, 2)):
            m = min(d_left, d_right) + 1
            if move_left:
                d_right = m
            else:
                d_left = m
        move_left = not move_left
    return min(d_left, d_right) + 1


def pair_distance(p1, q1, p2, q2):
    if p1 == p2 and q1 == q2:
        return 0
    x, y = normalize_pair(p1, q1, p2, q2)
    return ladder_distance(_tail_quotients(x, y))


def pair_distances(p1, q1, targets):
    """Distances from p1/q1 to each (p, q) in targets."""
    return [pair_distance(p1, q1, t[0], t[1]) for t in targets]


def _neighbors(p, q, height):
    if q == 0:
        for n in range(-height, height + 1):
            yield n, 1
        return
    if q == 1:
        yield 1, 0
        for s in range(1, height + 1):
            for r in (p * s - 1, p * s + 1):
                if -height <= r <= height:
                    yield r, s
        return
    inv = pow(p, -1, q)
    for eps, s0 in ((1, inv), (-1, q - inv)):
        for s in range(s0, height + 1, q):
            r = (p * s - eps) // q
            if -height <= r <= height:
                yield r, s


def farey_bfs(src_p, src_q, height, targets):
    """BFS distances from src to each target inside the height-bounded region.

    The region is {p/q : |p| <= height, 1 <= q <= height} plus 1/0.  Returns
    -1 for targets outside the region or unreachable inside it.
    """
    def inside(p, q):
        return (q == 0 and p == 1) or (1 <= q <= height and -height <= p <= height)

    if not inside(src_p, src_q):
        return [-1] * len(targets)
    wanted = {}
    for i, t in enumerate(targets):
        wanted.setdefault(tuple(t), []).append(i)
    out = [-1] * len(targets)
    remaining = len(wanted)
    dist = {(src_p, src_q): 0}
    queue = deque([(src_p, src_q)])
    while queue and remaining:
        v = queue.popleft()
        dv = dist[v]
        if v in wanted:
            for i in wanted[v]:
                out[i] = dv
            remaining -= 1
        for w in _neighbors(v[0], v[1], height):
            if w not in dist:
                dist[w] = dv + 1
                queue.append(w)
    return out


def _canon(a, b, c, d):
    if a < 0 or (a == 0 and b < 0) or (a == 0 and b == 0 and c < 0):
        return -a, -b, -c, -d
    return a, b, c, d


def _moves(m):
    a, b, c, d = m
    yield _canon(a, a + b, c, c + d)
    yield _canon(a, b - a, c, d - c)
    yield _canon(b, -a, d, -c)


def marking_bfs(g, cap):
    """Word length of g in PSL(2,Z) over {T, T^-1, S}, or -1 if above cap.

    Bidirectional BFS between the identity and g; full layers are expanded
    from the side with the smaller frontier.
    """
    start = (1, 0, 0, 1)
    goal = _canon(*g)
    if goal == start:
        return 0
    dist_a, dist_b = {start: 0}, {goal: 0}
    front_a, front_b = [start], [goal]
    rad_a = rad_b = 0
    while rad_a + rad_b < cap:
        if len(front_a) <= len(front_b):
            mine, other, front = dist_a, dist_b, front_a
            rad_a += 1
            radius = rad_a
        else:
            mine, other, front = dist_b, dist_a, front_b
            rad_b += 1
            radius = rad_b
        best = -1
        nxt = []
        for v in front:
            for w in _moves(v):
                if w in mine:
                    continue
                mine[w] = radius
                nxt.append(w)
                if w in other:
                    total = radius + other[w]
                    if best < 0 or total < best:
                        best = total
        if mine is dist_a:
            front_a = nxt
        else:
            front_b = nxt
        if best >= 0:
            return best if best <= cap else -1
        if not nxt:
            return -1
    return -1
