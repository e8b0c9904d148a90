"""Pure-Python bit-matrix kernels.

A relation over ``n`` worlds is a tuple ``down`` of ``n`` ints where bit ``u``
of ``down[w]`` is set iff ``u <= w``.  World sets are int bitmasks.
"""


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def transpose(down, n):
    up = [0] * n
    for w in range(n):
        for u in _bits(down[w]):
            up[u] |= 1 << w
    return tuple(up)


def closure(down, n):
    rows = [down[w] | (1 << w) for w in range(n)]
    for k in range(n):
        kb = 1 << k
        dk = rows[k]
        for w in range(n):
            if rows[w] & kb:
                rows[w] |= dk
    return tuple(rows)


def is_preorder(down, n):
    for w in range(n):
        row = down[w]
        if not row >> w & 1:
            return False
        for u in _bits(row):
            if down[u] & ~row:
                return False
    return True


def strict_down(down, n):
    up = transpose(down, n)
    return tuple(down[w] & ~up[w] for w in range(n))


def box(rel, n, s):
    out = 0
    for w in range(n):
        if not rel[w] & ~s:
            out |= 1 << w
    return out


def diamond(rel, n, s):
    out = 0
    for w in range(n):
        if rel[w] & s:
            out |= 1 << w
    return out


def minimal(down, n, s):
    sdown = strict_down(down, n)
    out = 0
    for w in _bits(s):
        if not sdown[w] & s:
            out |= 1 << w
    return out


def lex_revise(down, n, s):
    out = []
    for w in range(n):
        if s >> w & 1:
            out.append(down[w] & s)
        else:
            out.append((down[w] & ~s) | s)
    return tuple(out)


def degrees(down, n, s):
    """Longest strict chain inside each world's own zone (``s`` or its
    complement) that ends at the world."""
    sdown = strict_down(down, n)
    full = (1 << n) - 1
    # u < w implies down[u] is a proper subset of down[w]
    order = sorted(range(n), key=lambda w: bin(down[w]).count("1"))
    deg = [0] * n
    for w in order:
        zone = s if s >> w & 1 else full & ~s
        best = 0
        for u in _bits(sdown[w] & zone):
            if deg[u] > best:
                best = deg[u]
        deg[w] = best + 1
    return tuple(deg)


def lex_contract(down, n, s):
    deg = degrees(down, n, s)
    out = []
    for w in range(n):
        row = 0
        for u in range(n):
            if deg[u] <= deg[w]:
                row |= 1 << u
        out.append(row)
    return tuple(out)


def preorders(n):
    """All preorders on ``n`` labelled worlds, grown one world at a time."""
    found = [()]
    for k in range(n):
        nxt = []
        kb = 1 << k
        for rel in found:
            up = transpose(rel, k)
            for d in range(1 << k):
                # d must be down-closed
                ok = True
                for v in _bits(d):
                    if rel[v] & ~d:
                        ok = False
                        break
                if not ok:
                    continue
                # everything below some member of d sits below k
                for u_mask in range(1 << k):
                    good = True
                    for v in _bits(u_mask):
                        if up[v] & ~u_mask:
                            good = False
                            break
                    if not good:
                        continue
                    # transitivity through k: d <= k <= u forces d <= u
                    for v in _bits(u_mask):
                        if d & ~rel[v]:
                            good = False
                            break
                    if not good:
                        continue
                    row = [rel[w] | (kb if u_mask >> w & 1 else 0) for w in range(k)]
                    row.append(d | kb)
                    nxt.append(tuple(row))
        found = nxt
    return found
