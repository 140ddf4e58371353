# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contracts as ``_pycore`` but on int64.

Callers (``_kernels``) guarantee that inputs are small enough that no
intermediate overflows; nothing here re-checks.
"""
from libc.stdlib cimport malloc, calloc, free
from libc.stdint cimport int64_t, int32_t, uint64_t

ctypedef int64_t i64


cdef inline i64 _floordiv(i64 a, i64 b) nogil:
    cdef i64 q = a / b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        q -= 1
    return q


cdef inline i64 _mod(i64 a, i64 b) nogil:
    cdef i64 r = a % b
    if r < 0:
        r += b
    return r


cdef i64 _inverse(i64 a, i64 m) nogil:
    # a^-1 mod m for gcd(a, m) = 1, m >= 2
    cdef i64 t = 0, nt = 1, r = m, nr = _mod(a, m), q, tmp
    while nr != 0:
        q = r / nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    return _mod(t, m)


cdef int _ladder(i64* runs, Py_ssize_t n) nogil:
    cdef int dl = 1, dr = 1, m, j
    cdef bint left = True
    cdef Py_ssize_t i
    cdef i64 k
    if n == 0:
        return 1
    for i in range(n):
        k = runs[i]
        if i == 0:
            k -= 1
        if i == n - 1:
            k -= 1
        if k > 2:
            k = 2
        for j in range(k):
            m = (dl if dl < dr else dr) + 1
            if left:
                dr = m
            else:
                dl = m
        left = not left
    return (dl if dl < dr else dr) + 1


def ladder_distance(quotients):
    cdef Py_ssize_t n = len(quotients), i
    cdef i64* buf = <i64*>malloc((n + 1) * sizeof(i64))
    cdef int out
    try:
        for i in range(n):
            buf[i] = quotients[i]
        out = _ladder(buf, n)
    finally:
        free(buf)
    return out


cdef int _pair(i64 p1, i64 q1, i64 p2, i64 q2) nogil:
    cdef i64 a, b, c, d, x, y, r, tmp
    cdef i64 runs[128]
    cdef Py_ssize_t n = 0
    if p1 == p2 and q1 == q2:
        return 0
    if q1 == 0:
        a = 1; b = 0; c = 0; d = 1
    elif q1 == 1:
        a = 0; b = 1; c = -1; d = p1
    else:
        a = _inverse(p1, q1)
        b = _floordiv(1 - a * p1, q1)
        c = -q1
        d = p1
    x = a * p2 + b * q2
    y = c * p2 + d * q2
    if y < 0:
        x = -x
        y = -y
    # tail quotients of x / y
    tmp = _mod(x, y)
    x = y
    y = tmp
    while y != 0:
        runs[n] = x / y
        n += 1
        r = x % y
        x = y
        y = r
    return _ladder(runs, n)


def pair_distance(i64 p1, i64 q1, i64 p2, i64 q2):
    return _pair(p1, q1, p2, q2)


def pair_distances(i64 p1, i64 q1, targets):
    """Distances from p1/q1 to each (p, q) in targets."""
    cdef Py_ssize_t i, n = len(targets)
    out = [0] * n
    for i in range(n):
        t = targets[i]
        out[i] = _pair(p1, q1, t[0], t[1])
    return out


cdef inline Py_ssize_t _slot(i64 p, i64 q, i64 h) nogil:
    if q == 0:
        return (2 * h + 1) * h
    return (p + h) * h + (q - 1)


def farey_bfs(i64 src_p, i64 src_q, i64 height, targets):
    cdef i64 h = height
    cdef Py_ssize_t size = (2 * h + 1) * h + 1
    cdef int32_t* dist = <int32_t*>malloc(size * sizeof(int32_t))
    cdef char* wanted = <char*>calloc(size, sizeof(char))
    cdef Py_ssize_t remaining = 0
    cdef i64* qp = <i64*>malloc(size * sizeof(i64))
    cdef i64* qq = <i64*>malloc(size * sizeof(i64))
    cdef Py_ssize_t head = 0, tail = 0, i, slot
    cdef i64 p, q, s, r, inv, s0, eps, n
    cdef int32_t dv
    cdef int k
    cdef Py_ssize_t nt = len(targets)
    out = [-1] * nt
    if dist == NULL or qp == NULL or qq == NULL or wanted == NULL:
        free(dist); free(qp); free(qq); free(wanted)
        raise MemoryError()
    try:
        if not ((src_q == 0 and src_p == 1) or
                (1 <= src_q <= h and -h <= src_p <= h)):
            return out
        for i in range(nt):
            t = targets[i]
            p = t[0]
            q = t[1]
            if (q == 0 and p == 1) or (1 <= q <= h and -h <= p <= h):
                slot = _slot(p, q, h)
                if not wanted[slot]:
                    wanted[slot] = 1
                    remaining += 1
        with nogil:
            for i in range(size):
                dist[i] = -1
            slot = _slot(src_p, src_q, h)
            dist[slot] = 0
            if wanted[slot]:
                remaining -= 1
            qp[0] = src_p
            qq[0] = src_q
            tail = 1
            while head < tail and remaining > 0:
                p = qp[head]
                q = qq[head]
                head += 1
                dv = dist[_slot(p, q, h)] + 1
                if q == 0:
                    for n in range(-h, h + 1):
                        slot = _slot(n, 1, h)
                        if dist[slot] < 0:
                            dist[slot] = dv
                            remaining -= wanted[slot]
                            qp[tail] = n; qq[tail] = 1; tail += 1
                    continue
                if q == 1:
                    slot = _slot(1, 0, h)
                    if dist[slot] < 0:
                        dist[slot] = dv
                        remaining -= wanted[slot]
                        qp[tail] = 1; qq[tail] = 0; tail += 1
                    for s in range(1, h + 1):
                        for k in range(2):
                            r = p * s - 1 + 2 * k
                            if -h <= r <= h:
                                slot = _slot(r, s, h)
                                if dist[slot] < 0:
                                    dist[slot] = dv
                                    remaining -= wanted[slot]
                                    qp[tail] = r; qq[tail] = s; tail += 1
                    continue
                inv = _inverse(p, q)
                for k in range(2):
                    if k == 0:
                        eps = 1
                        s0 = inv
                    else:
                        eps = -1
                        s0 = q - inv
                    s = s0
                    while s <= h:
                        r = _floordiv(p * s - eps, q)
                        if -h <= r <= h:
                            slot = _slot(r, s, h)
                            if dist[slot] < 0:
                                dist[slot] = dv
                                remaining -= wanted[slot]
                                qp[tail] = r; qq[tail] = s; tail += 1
                        s += q
        for i in range(nt):
            t = targets[i]
            p = t[0]
            q = t[1]
            if (q == 0 and p == 1) or (1 <= q <= h and -h <= p <= h):
                out[i] = dist[_slot(p, q, h)]
        return out
    finally:
        free(dist)
        free(qp)
        free(qq)
        free(wanted)


# Open-addressing table of PSL(2,Z) elements -> distance, used by marking_bfs.

cdef struct Table:
    i64* keys      # 4 per slot
    int32_t* vals  # -1 marks an empty slot
    Py_ssize_t cap
    Py_ssize_t used


cdef inline uint64_t _hash(i64 a, i64 b, i64 c, i64 d) nogil:
    cdef uint64_t h = <uint64_t>a * 0x9E3779B97F4A7C15ULL
    h ^= <uint64_t>b + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2)
    h ^= <uint64_t>c * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2)
    h ^= <uint64_t>d * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2)
    h ^= h >> 31
    return h


cdef int _table_init(Table* t, Py_ssize_t cap) nogil:
    cdef Py_ssize_t i
    t.cap = cap
    t.used = 0
    t.keys = <i64*>malloc(4 * cap * sizeof(i64))
    t.vals = <int32_t*>malloc(cap * sizeof(int32_t))
    if t.keys == NULL or t.vals == NULL:
        return -1
    for i in range(cap):
        t.vals[i] = -1
    return 0


cdef void _table_free(Table* t) nogil:
    free(t.keys)
    free(t.vals)
    t.keys = NULL
    t.vals = NULL


cdef Py_ssize_t _find(Table* t, i64 a, i64 b, i64 c, i64 d) nogil:
    # slot holding the key, or the empty slot where it would go
    cdef Py_ssize_t mask = t.cap - 1
    cdef Py_ssize_t i = <Py_ssize_t>(_hash(a, b, c, d) & <uint64_t>mask)
    cdef i64* k
    while t.vals[i] >= 0:
        k = t.keys + 4 * i
        if k[0] == a and k[1] == b and k[2] == c and k[3] == d:
            return i
        i = (i + 1) & mask
    return i


cdef int _grow(Table* t) nogil:
    cdef Table fresh
    cdef Py_ssize_t i, j
    cdef i64* k
    if _table_init(&fresh, t.cap * 2) < 0:
        _table_free(&fresh)
        return -1
    for i in range(t.cap):
        if t.vals[i] >= 0:
            k = t.keys + 4 * i
            j = _find(&fresh, k[0], k[1], k[2], k[3])
            fresh.keys[4 * j] = k[0]
            fresh.keys[4 * j + 1] = k[1]
            fresh.keys[4 * j + 2] = k[2]
            fresh.keys[4 * j + 3] = k[3]
            fresh.vals[j] = t.vals[i]
            fresh.used += 1
    _table_free(t)
    t[0] = fresh
    return 0


cdef inline int32_t _lookup(Table* t, i64 a, i64 b, i64 c, i64 d) nogil:
    return t.vals[_find(t, a, b, c, d)]


cdef int _insert(Table* t, i64 a, i64 b, i64 c, i64 d, int32_t v) nogil:
    # 1 if inserted, 0 if present, -1 on allocation failure
    cdef Py_ssize_t i
    if 2 * (t.used + 1) > t.cap:
        if _grow(t) < 0:
            return -1
    i = _find(t, a, b, c, d)
    if t.vals[i] >= 0:
        return 0
    t.keys[4 * i] = a
    t.keys[4 * i + 1] = b
    t.keys[4 * i + 2] = c
    t.keys[4 * i + 3] = d
    t.vals[i] = v
    t.used += 1
    return 1


cdef struct Frontier:
    i64* data
    Py_ssize_t n
    Py_ssize_t cap


cdef int _push(Frontier* f, i64 a, i64 b, i64 c, i64 d) nogil:
    cdef i64* grown
    cdef Py_ssize_t i
    if f.n == f.cap:
        grown = <i64*>malloc(8 * f.cap * sizeof(i64))
        if grown == NULL:
            return -1
        for i in range(4 * f.n):
            grown[i] = f.data[i]
        free(f.data)
        f.data = grown
        f.cap *= 2
    f.data[4 * f.n] = a
    f.data[4 * f.n + 1] = b
    f.data[4 * f.n + 2] = c
    f.data[4 * f.n + 3] = d
    f.n += 1
    return 0


cdef inline void _canon(i64* m) nogil:
    if m[0] < 0 or (m[0] == 0 and m[1] < 0) or (m[0] == 0 and m[1] == 0 and m[2] < 0):
        m[0] = -m[0]; m[1] = -m[1]; m[2] = -m[2]; m[3] = -m[3]


cdef int _expand(Table* mine, Table* other, Frontier* cur, Frontier* nxt,
                 int32_t radius, int* best) nogil:
    cdef Py_ssize_t i
    cdef int g, rc
    cdef int32_t od
    cdef i64 a, b, c, d
    cdef i64 m[4]
    for i in range(cur.n):
        a = cur.data[4 * i]; b = cur.data[4 * i + 1]
        c = cur.data[4 * i + 2]; d = cur.data[4 * i + 3]
        for g in range(3):
            if g == 0:
                m[0] = a; m[1] = a + b; m[2] = c; m[3] = c + d
            elif g == 1:
                m[0] = a; m[1] = b - a; m[2] = c; m[3] = d - c
            else:
                m[0] = b; m[1] = -a; m[2] = d; m[3] = -c
            _canon(m)
            rc = _insert(mine, m[0], m[1], m[2], m[3], radius)
            if rc < 0:
                return -1
            if rc == 0:
                continue
            if _push(nxt, m[0], m[1], m[2], m[3]) < 0:
                return -1
            od = _lookup(other, m[0], m[1], m[2], m[3])
            if od >= 0 and (best[0] < 0 or radius + od < best[0]):
                best[0] = radius + od
    return 0


def marking_bfs(g, int cap):
    cdef Table ta, tb
    cdef Frontier fa, fb, nx
    cdef i64 s[4]
    cdef int rad_a = 0, rad_b = 0, best = -1, rc = 0, result = -2
    cdef bint side_a
    s[0] = g[0]; s[1] = g[1]; s[2] = g[2]; s[3] = g[3]
    _canon(s)
    if s[0] == 1 and s[1] == 0 and s[2] == 0 and s[3] == 1:
        return 0
    ta.keys = NULL; tb.keys = NULL; ta.vals = NULL; tb.vals = NULL
    fa.data = NULL; fb.data = NULL; nx.data = NULL
    try:
        if _table_init(&ta, 1024) < 0 or _table_init(&tb, 1024) < 0:
            raise MemoryError()
        fa.cap = fb.cap = nx.cap = 64
        fa.n = fb.n = nx.n = 0
        fa.data = <i64*>malloc(4 * 64 * sizeof(i64))
        fb.data = <i64*>malloc(4 * 64 * sizeof(i64))
        nx.data = <i64*>malloc(4 * 64 * sizeof(i64))
        if fa.data == NULL or fb.data == NULL or nx.data == NULL:
            raise MemoryError()
        _insert(&ta, 1, 0, 0, 1, 0)
        _push(&fa, 1, 0, 0, 1)
        _insert(&tb, s[0], s[1], s[2], s[3], 0)
        _push(&fb, s[0], s[1], s[2], s[3])
        with nogil:
            while rad_a + rad_b < cap:
                side_a = fa.n <= fb.n
                nx.n = 0
                if side_a:
                    rad_a += 1
                    rc = _expand(&ta, &tb, &fa, &nx, rad_a, &best)
                    fa, nx = nx, fa
                else:
                    rad_b += 1
                    rc = _expand(&tb, &ta, &fb, &nx, rad_b, &best)
                    fb, nx = nx, fb
                if rc < 0:
                    break
                if best >= 0:
                    result = best if best <= cap else -1
                    break
                if (fa.n if side_a else fb.n) == 0:
                    result = -1
                    break
        if rc < 0:
            raise MemoryError()
        return -1 if result == -2 else result
    finally:
        _table_free(&ta)
        _table_free(&tb)
        free(fa.data)
        free(fb.data)
        free(nx.data)
