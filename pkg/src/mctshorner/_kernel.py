"""Compiled Horner + CSE instruction counter.

Same construction as :func:`mctshorner.horner.horner_transform` followed by
:func:`mctshorner.cse.cse`, written over flat int64 arrays so numba can
compile it. Terms are sorted lexicographically by their exponents in the
requested variable order, which turns every Horner sub-polynomial into a
contiguous range; nodes are hash-consed in an open-addressing table.

All buffers are allocated by the caller. When one is too small the kernel
returns a negative status and the caller retries with larger buffers.
"""

import numpy as np
from numba import njit

CONST, VAR, ADD, MUL = 0, 1, 2, 3

OK = 0
NODES_FULL = -1
POOL_FULL = -2
SCRATCH_FULL = -3

_M1 = 0x9E3779B97F4A7C15 - (1 << 64)
_M2 = 0xBF58476D1CE4E5B9 - (1 << 64)
_M3 = 0x94D049BB133111EB - (1 << 64)


@njit(cache=True)
def _mix(h, x):
    # splitmix64-style finalizer; int64 wraparound is intended
    h = (h + x + _M1) * _M2
    h = (h ^ (h >> 31)) * _M3
    return h ^ (h >> 29)


@njit(cache=True)
def _leaf_cmp(a, b, kind, val, varkey):
    ka = kind[a]
    kb = kind[b]
    if ka != kb:
        return -1 if ka < kb else 1
    if ka == CONST:
        xa = val[a]
        xb = val[b]
    elif ka == VAR:
        xa = varkey[val[a]]
        xb = varkey[val[b]]
    else:
        return 0
    if xa == xb:
        return 0
    return -1 if xa < xb else 1


@njit(cache=True)
def _cmp(a, b, kind, val, varkey, cstart, clen, pool, cmp_stack):
    """Lexicographic structural order: Const < Var < Add < Mul.

    Iterative; ``cmp_stack`` rows hold (a, b, next child index).
    """
    if a == b:
        return 0
    r = _leaf_cmp(a, b, kind, val, varkey)
    if r != 0 or kind[a] < ADD:
        return r
    sp = 0
    cmp_stack[0, 0] = a
    cmp_stack[0, 1] = b
    cmp_stack[0, 2] = 0
    sp = 1
    while sp > 0:
        x = cmp_stack[sp - 1, 0]
        y = cmp_stack[sp - 1, 1]
        i = cmp_stack[sp - 1, 2]
        lx = clen[x]
        ly = clen[y]
        m = lx if lx < ly else ly
        if i >= m:
            if lx != ly:
                return -1 if lx < ly else 1
            sp -= 1
            continue
        cmp_stack[sp - 1, 2] = i + 1
        cx = pool[cstart[x] + i]
        cy = pool[cstart[y] + i]
        if cx == cy:
            continue
        r = _leaf_cmp(cx, cy, kind, val, varkey)
        if r != 0:
            return r
        if kind[cx] >= ADD:
            if sp >= cmp_stack.shape[0]:
                return 2  # caller treats as overflow
            cmp_stack[sp, 0] = cx
            cmp_stack[sp, 1] = cy
            cmp_stack[sp, 2] = 0
            sp += 1
    return 0


@njit(cache=True)
def _intern(k, buf, n, st, kind, val, varkey, cstart, clen, pool, table, cmp_stack):
    # st: [n_nodes, pool_used, status]
    # insertion sort of the child list into canonical order
    for i in range(1, n):
        x = buf[i]
        j = i - 1
        while j >= 0:
            r = _cmp(buf[j], x, kind, val, varkey, cstart, clen, pool, cmp_stack)
            if r == 2:
                st[2] = SCRATCH_FULL
                return 0
            if r <= 0:
                break
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = x
    h = _mix(k * _M1, n)
    for i in range(n):
        h = _mix(h, buf[i])
    mask = table.shape[0] - 1
    slot = h & mask
    while True:
        nid = table[slot]
        if nid < 0:
            break
        if kind[nid] == k and clen[nid] == n:
            s = cstart[nid]
            same = True
            for i in range(n):
                if pool[s + i] != buf[i]:
                    same = False
                    break
            if same:
                return nid
        slot = (slot + 1) & mask
    nid = st[0]
    if nid >= kind.shape[0] or 2 * nid >= table.shape[0]:
        st[2] = NODES_FULL
        return 0
    p = st[1]
    if p + n > pool.shape[0]:
        st[2] = POOL_FULL
        return 0
    for i in range(n):
        pool[p + i] = buf[i]
    kind[nid] = k
    val[nid] = 0
    cstart[nid] = p
    clen[nid] = n
    table[slot] = nid
    st[0] = nid + 1
    st[1] = p + n
    return nid


@njit(cache=True)
def _const(c, st, kind, val, cstart, clen, table):
    h = _mix(CONST * _M1, c)
    mask = table.shape[0] - 1
    slot = h & mask
    while True:
        nid = table[slot]
        if nid < 0:
            break
        if kind[nid] == CONST and val[nid] == c:
            return nid
        slot = (slot + 1) & mask
    nid = st[0]
    if nid >= kind.shape[0] or 2 * nid >= table.shape[0]:
        st[2] = NODES_FULL
        return 0
    kind[nid] = CONST
    val[nid] = c
    cstart[nid] = 0
    clen[nid] = 0
    table[slot] = nid
    st[0] = nid + 1
    return nid


@njit(cache=True)
def _make(k, inp, n, out, st, kind, val, varkey, cstart, clen, pool, table, cmp_stack):
    """Flatten, fold constants, sort and intern an Add (k=ADD) or Mul."""
    m = 0
    const = 0 if k == ADD else 1
    for i in range(n):
        c = inp[i]
        kc = kind[c]
        if kc == k:
            s = cstart[c]
            for j in range(clen[c]):
                g = pool[s + j]
                if kind[g] == CONST:
                    const = const + val[g] if k == ADD else const * val[g]
                else:
                    if m >= out.shape[0]:
                        st[2] = SCRATCH_FULL
                        return 0
                    out[m] = g
                    m += 1
        elif kc == CONST:
            const = const + val[c] if k == ADD else const * val[c]
        else:
            if m >= out.shape[0]:
                st[2] = SCRATCH_FULL
                return 0
            out[m] = c
            m += 1
    if k == MUL and const == 0:
        return _const(0, st, kind, val, cstart, clen, table)
    if m == 0:
        return _const(const, st, kind, val, cstart, clen, table)
    neutral = 0 if k == ADD else 1
    if const != neutral:
        if m >= out.shape[0]:
            st[2] = SCRATCH_FULL
            return 0
        out[m] = _const(const, st, kind, val, cstart, clen, table)
        m += 1
    if m == 1:
        return out[0]
    return _intern(k, out, m, st, kind, val, varkey, cstart, clen, pool, table, cmp_stack)


@njit(cache=True)
def _monomial(t, level, exps, coeffs, order, st, inp, out,
              kind, val, varkey, cstart, clen, pool, table, cmp_stack):
    nv = order.shape[0]
    inp[0] = _const(coeffs[t], st, kind, val, cstart, clen, table)
    n = 1
    for l in range(level, nv):
        v = order[l]
        for _ in range(exps[t, v]):
            if n >= inp.shape[0]:
                st[2] = SCRATCH_FULL
                return 0
            inp[n] = v  # variable leaves have nid == position
            n += 1
    return _make(MUL, inp, n, out, st, kind, val, varkey, cstart, clen, pool, table, cmp_stack)


@njit(cache=True)
def _group_start(perm, exps, lo, end, v):
    e = exps[perm[end - 1], v]
    start = end - 1
    while start > lo and exps[perm[start - 1], v] == e:
        start -= 1
    return start, e


# frame columns for the explicit Horner recursion stack
_LO, _HI, _LEVEL, _V, _EPREV, _END, _INNER, _ECUR, _START, _PHASE = range(10)


@njit(cache=True)
def _horner(perm, exps, coeffs, order, st, inp, out,
            kind, val, varkey, cstart, clen, pool, table, cmp_stack, frames):
    """Horner node for all terms; each frame is one sub-polynomial range.

    Phase 0 enters a range, phase 1 receives the highest-exponent group,
    phase 2 receives each lower group and wraps it around the running
    inner expression.
    """
    nv = order.shape[0]
    nt = perm.shape[0]
    sp = 0
    frames[0, _LO] = 0
    frames[0, _HI] = nt
    frames[0, _LEVEL] = 0
    frames[0, _PHASE] = 0
    sp = 1
    ret = 0
    while sp > 0:
        if st[2] != OK:
            return 0
        f = sp - 1
        lo = frames[f, _LO]
        phase = frames[f, _PHASE]
        if phase == 0:
            hi = frames[f, _HI]
            level = frames[f, _LEVEL]
            if hi - lo == 1:
                ret = _monomial(perm[lo], level, exps, coeffs, order, st, inp, out,
                                kind, val, varkey, cstart, clen, pool, table, cmp_stack)
                sp -= 1
                continue
            last = perm[hi - 1]
            # the range is sorted on this column, so an absent variable has a zero last entry
            while level < nv and exps[last, order[level]] == 0:
                level += 1
            if level == nv:
                s = 0
                for i in range(lo, hi):
                    s += coeffs[perm[i]]
                ret = _const(s, st, kind, val, cstart, clen, table)
                sp -= 1
                continue
            v = order[level]
            start, e = _group_start(perm, exps, lo, hi, v)
            frames[f, _LEVEL] = level
            frames[f, _V] = v
            frames[f, _EPREV] = e
            frames[f, _END] = start
            frames[f, _PHASE] = 1
            if sp >= frames.shape[0]:
                st[2] = SCRATCH_FULL
                return 0
            frames[sp, _LO] = start
            frames[sp, _HI] = hi
            frames[sp, _LEVEL] = level + 1
            frames[sp, _PHASE] = 0
            sp += 1
            continue
        v = frames[f, _V]
        if phase == 1:
            inner = ret
        else:
            e = frames[f, _ECUR]
            gap = frames[f, _EPREV] - e
            if gap + 1 > inp.shape[0]:
                st[2] = SCRATCH_FULL
                return 0
            for i in range(gap):
                inp[i] = v
            inp[gap] = frames[f, _INNER]
            mul = _make(MUL, inp, gap + 1, out, st, kind, val, varkey, cstart, clen, pool, table, cmp_stack)
            inp[0] = ret
            inp[1] = mul
            inner = _make(ADD, inp, 2, out, st, kind, val, varkey, cstart, clen, pool, table, cmp_stack)
            frames[f, _EPREV] = e
            frames[f, _END] = frames[f, _START]
        frames[f, _INNER] = inner
        end = frames[f, _END]
        if end > lo:
            start, e = _group_start(perm, exps, lo, end, v)
            frames[f, _ECUR] = e
            frames[f, _START] = start
            frames[f, _PHASE] = 2
            frames[sp, _LO] = start
            frames[sp, _HI] = end
            frames[sp, _LEVEL] = frames[f, _LEVEL] + 1
            frames[sp, _PHASE] = 0
            sp += 1
            continue
        e_prev = frames[f, _EPREV]
        if e_prev > 0:
            if e_prev + 1 > inp.shape[0]:
                st[2] = SCRATCH_FULL
                return 0
            for i in range(e_prev):
                inp[i] = v
            inp[e_prev] = inner
            inner = _make(MUL, inp, e_prev + 1, out, st, kind, val, varkey, cstart, clen, pool, table, cmp_stack)
        ret = inner
        sp -= 1
    return ret


@njit(cache=True)
def _binop(op, a, b, nxt, bkey, bval):
    if b < a:
        a, b = b, a
    h = _mix(_mix(op * _M1, a), b)
    mask = bval.shape[0] - 1
    slot = h & mask
    while True:
        if bval[slot] < 0:
            bkey[slot, 0] = op
            bkey[slot, 1] = a
            bkey[slot, 2] = b
            bval[slot] = nxt
            return nxt, True
        if bkey[slot, 0] == op and bkey[slot, 1] == a and bkey[slot, 2] == b:
            return bval[slot], False
        slot = (slot + 1) & mask


@njit(cache=True)
def _count(root, n_nodes, kind, val, cstart, clen, pool, value, stack, bkey, bval):
    """Distinct ADD and MUL instructions reachable from ``root``."""
    adds = 0
    muls = 0
    for i in range(n_nodes):
        value[i] = i if kind[i] < ADD else -1
    nxt = n_nodes
    if kind[root] < ADD:
        return 0, 0, OK
    sp = 0
    stack[sp] = root
    sp += 1
    while sp > 0:
        node = stack[sp - 1]
        if value[node] >= 0:
            sp -= 1
            continue
        s = cstart[node]
        n = clen[node]
        pending = False
        for i in range(n):
            c = pool[s + i]
            if value[c] < 0:
                if sp >= stack.shape[0]:
                    return 0, 0, SCRATCH_FULL
                stack[sp] = c
                sp += 1
                pending = True
        if pending:
            continue
        sp -= 1
        first = pool[s]
        lo = 0
        neg = kind[node] == MUL and kind[first] == CONST and val[first] == -1
        if neg:
            lo = 1
        acc = value[pool[s + lo]]
        for i in range(lo + 1, n):
            acc, new = _binop(kind[node], acc, value[pool[s + i]], nxt, bkey, bval)
            if new:
                nxt += 1
                if kind[node] == ADD:
                    adds += 1
                else:
                    muls += 1
        if neg:
            acc, new = _binop(4, acc, -1, nxt, bkey, bval)
            if new:
                nxt += 1
        value[node] = acc
    return adds, muls, OK


@njit(cache=True)
def horner_cse_cost(exps, coeffs, varkey, order, kind, val, cstart, clen, pool,
                    table, inp, out, value, stack, bkey, bval, cmp_stack, frames):
    """Return (adds, muls, status) for one variable order (positions)."""
    nt = exps.shape[0]
    nv = exps.shape[1]
    if nt == 0:
        return 0, 0, OK
    if nv >= kind.shape[0] or 2 * nv >= table.shape[0]:
        return 0, 0, NODES_FULL
    if inp.shape[0] < 2 or cmp_stack.shape[0] < 1 or frames.shape[0] < nv + 2:
        return 0, 0, SCRATCH_FULL
    perm = np.arange(nt)
    for li in range(nv - 1, -1, -1):
        col = exps[perm, order[li]]
        perm = perm[np.argsort(col, kind="mergesort")]
    table[:] = -1
    bval[:] = -1
    st = np.zeros(3, dtype=np.int64)
    for v in range(nv):
        kind[v] = VAR
        val[v] = v
        cstart[v] = 0
        clen[v] = 0
    st[0] = nv
    root = _horner(perm, exps, coeffs, order, st, inp, out,
                   kind, val, varkey, cstart, clen, pool, table, cmp_stack, frames)
    if st[2] != OK:
        return 0, 0, st[2]
    if 2 * st[1] + 2 * st[0] > bval.shape[0] or st[0] > stack.shape[0]:
        return 0, 0, NODES_FULL
    return _count(root, st[0], kind, val, cstart, clen, pool, value, stack, bkey, bval)
