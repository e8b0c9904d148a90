# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled bit-matrix kernels; same contract as ``_kernels_py``."""

ctypedef unsigned long long u64

DEF MAXW = 64


cdef inline int _popcount(u64 x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


cdef inline int _load(tuple down, int n, u64* rows) except -1:
    cdef int w
    if n > MAXW:
        raise ValueError("at most 64 worlds supported")
    for w in range(n):
        rows[w] = down[w]
    return 0


cdef inline void _transpose(u64* rows, int n, u64* up) nogil:
    cdef int w, u
    for w in range(n):
        up[w] = 0
    for w in range(n):
        for u in range(n):
            if (rows[w] >> u) & 1:
                up[u] |= (<u64>1) << w


cdef tuple _pack(u64* rows, int n):
    return tuple([rows[w] for w in range(n)])


def transpose(tuple down, int n):
    cdef u64 rows[MAXW]
    cdef u64 up[MAXW]
    _load(down, n, rows)
    _transpose(rows, n, up)
    return _pack(up, n)


def closure(tuple down, int n):
    cdef u64 rows[MAXW]
    cdef int k, w
    cdef u64 kb
    _load(down, n, rows)
    for w in range(n):
        rows[w] |= (<u64>1) << w
    for k in range(n):
        kb = (<u64>1) << k
        for w in range(n):
            if rows[w] & kb:
                rows[w] |= rows[k]
    return _pack(rows, n)


def is_preorder(tuple down, int n):
    cdef u64 rows[MAXW]
    cdef int w, u
    _load(down, n, rows)
    for w in range(n):
        if not (rows[w] >> w) & 1:
            return False
        for u in range(n):
            if (rows[w] >> u) & 1 and rows[u] & ~rows[w]:
                return False
    return True


cdef void _strict(u64* rows, int n, u64* out) nogil:
    cdef u64 up[MAXW]
    cdef int w
    _transpose(rows, n, up)
    for w in range(n):
        out[w] = rows[w] & ~up[w]


def strict_down(tuple down, int n):
    cdef u64 rows[MAXW]
    cdef u64 out[MAXW]
    _load(down, n, rows)
    _strict(rows, n, out)
    return _pack(out, n)


def box(tuple rel, int n, u64 s):
    cdef u64 out = 0
    cdef int w
    cdef u64 row
    for w in range(n):
        row = rel[w]
        if not row & ~s:
            out |= (<u64>1) << w
    return out


def diamond(tuple rel, int n, u64 s):
    cdef u64 out = 0
    cdef int w
    cdef u64 row
    for w in range(n):
        row = rel[w]
        if row & s:
            out |= (<u64>1) << w
    return out


def minimal(tuple down, int n, u64 s):
    cdef u64 rows[MAXW]
    cdef u64 sd[MAXW]
    cdef u64 out = 0
    cdef int w
    _load(down, n, rows)
    _strict(rows, n, sd)
    for w in range(n):
        if (s >> w) & 1 and not sd[w] & s:
            out |= (<u64>1) << w
    return out


def lex_revise(tuple down, int n, u64 s):
    cdef u64 rows[MAXW]
    cdef int w
    _load(down, n, rows)
    for w in range(n):
        if (s >> w) & 1:
            rows[w] = rows[w] & s
        else:
            rows[w] = (rows[w] & ~s) | s
    return _pack(rows, n)


cdef void _degrees(u64* rows, int n, u64 s, int* deg) nogil:
    cdef u64 sd[MAXW]
    cdef int order[MAXW]
    cdef int pc[MAXW]
    cdef int i, j, w, u, best, tmp
    cdef u64 full, zone, cand
    _strict(rows, n, sd)
    if n == 64:
        full = ~(<u64>0)
    else:
        full = ((<u64>1) << n) - 1
    for w in range(n):
        order[w] = w
        pc[w] = _popcount(rows[w])
    # insertion sort by down-set size keeps predecessors first
    for i in range(1, n):
        j = i
        while j > 0 and pc[order[j - 1]] > pc[order[j]]:
            tmp = order[j]
            order[j] = order[j - 1]
            order[j - 1] = tmp
            j -= 1
    for i in range(n):
        w = order[i]
        if (s >> w) & 1:
            zone = s
        else:
            zone = full & ~s
        best = 0
        cand = sd[w] & zone
        for u in range(n):
            if (cand >> u) & 1 and deg[u] > best:
                best = deg[u]
        deg[w] = best + 1


def degrees(tuple down, int n, u64 s):
    cdef u64 rows[MAXW]
    cdef int deg[MAXW]
    _load(down, n, rows)
    _degrees(rows, n, s, deg)
    return tuple([deg[w] for w in range(n)])


def lex_contract(tuple down, int n, u64 s):
    cdef u64 rows[MAXW]
    cdef int deg[MAXW]
    cdef int w, u
    _load(down, n, rows)
    _degrees(rows, n, s, deg)
    for w in range(n):
        rows[w] = 0
        for u in range(n):
            if deg[u] <= deg[w]:
                rows[w] |= (<u64>1) << u
    return _pack(rows, n)


def preorders(int n):
    """All preorders on ``n`` labelled worlds, grown one world at a time."""
    cdef list found = [()]
    cdef list nxt
    cdef u64 rows[MAXW]
    cdef u64 up[MAXW]
    cdef int k, v, w
    cdef u64 d, um, kb
    cdef bint ok
    if n > 16:
        raise ValueError("enumeration is limited to 16 worlds")
    for k in range(n):
        nxt = []
        kb = (<u64>1) << k
        for rel in found:
            _load(rel, k, rows)
            _transpose(rows, k, up)
            for d in range((<u64>1) << k):
                ok = True
                for v in range(k):
                    if (d >> v) & 1 and rows[v] & ~d:
                        ok = False
                        break
                if not ok:
                    continue
                for um in range((<u64>1) << k):
                    ok = True
                    for v in range(k):
                        if (um >> v) & 1 and (up[v] & ~um or d & ~rows[v]):
                            ok = False
                            break
                    if not ok:
                        continue
                    row = [rows[w] | (kb if (um >> w) & 1 else 0) for w in range(k)]
                    row.append(d | kb)
                    nxt.append(tuple(row))
        found = nxt
    return found
