"""Fast instruction counts for the order-search loops.

Both evaluators reproduce ``instruction_count(cse(horner_transform(p, o)))``
exactly; the test suite checks them against that reference pipeline and
against each other. :class:`CostEvaluator` runs the compiled kernel when the
coefficients fit in int64 and falls back to :class:`PyCostEvaluator`
otherwise.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np

from .expr import OpCount, Polynomial, Variable, naive_op_count

__all__ = ["CostEvaluator", "PyCostEvaluator"]


_CONST, _VAR, _ADD, _MUL = 0, 1, 2, 3


class PyCostEvaluator:
    """Horner + CSE instruction counts for many orders of one polynomial.

    Expression nodes are interned as integer ids. Each composite node stores
    the value ids of the binary operations in its left-associated chain, so
    the CSE cost of a whole expression is the number of distinct chain ids
    reachable from its root.

    Memo tables are dropped wholesale once they hold ``memo_limit`` term
    indices; results do not depend on the memo state.
    """

    def __init__(self, p: Polynomial, memo_limit: int = 4_000_000):
        self.polynomial = p
        self.variables: Tuple[Variable, ...] = p.variables
        self._pos = {v: i for i, v in enumerate(self.variables)}
        ids = [v.id for v in self.variables]
        nv = len(self.variables)
        self._coeffs: List[int] = []
        self._exps: List[Tuple[int, ...]] = []
        self._masks: List[int] = []
        for mono, c in p.items():
            e = [0] * nv
            mask = 0
            for v, k in mono:
                i = self._pos[v]
                e[i] = k
                mask |= 1 << i
            self._coeffs.append(c)
            self._exps.append(tuple(e))
            self._masks.append(mask)
        self._var_ids = ids
        self.naive_total = naive_op_count(p).total
        self.memo_limit = memo_limit
        self._reset()
        self.evaluations = 0

    def _reset(self) -> None:
        self._intern: Dict[tuple, int] = {}
        self._kind: List[int] = []
        self._children: List[Tuple[int, ...]] = []
        self._cval: List[int] = []
        self._skey: List[tuple] = []
        self._val: List[int] = []
        self._add_chain: List[Tuple[int, ...]] = []
        self._mul_chain: List[Tuple[int, ...]] = []
        self._bin: Dict[tuple, int] = {}
        self._nvals = 0
        self._memo: Dict[tuple, int] = {}
        self._memo_size = 0
        self._order_cache: Dict[Tuple[int, ...], Tuple[int, int]] = {}

    # node construction

    def _new_val(self) -> int:
        self._nvals += 1
        return self._nvals - 1

    def _binop(self, op: str, a: int, b: int) -> int:
        key = (op, a, b) if a <= b else (op, b, a)
        v = self._bin.get(key)
        if v is None:
            v = self._bin[key] = self._new_val()
        return v

    def _leaf(self, kind: int, value: int) -> int:
        key = (kind, value)
        nid = self._intern.get(key)
        if nid is None:
            nid = len(self._kind)
            self._intern[key] = nid
            self._kind.append(kind)
            self._children.append(())
            self._cval.append(value)
            self._skey.append((0, value) if kind == _CONST else (1, self._var_ids[value]))
            self._val.append(self._new_val())
            self._add_chain.append(())
            self._mul_chain.append(())
        return nid

    def _nary(self, kind: int, children: List[int]) -> int:
        skey = self._skey
        children.sort(key=skey.__getitem__)
        ch = tuple(children)
        key = (kind, ch)
        nid = self._intern.get(key)
        if nid is not None:
            return nid
        nid = len(self._kind)
        self._intern[key] = nid
        self._kind.append(kind)
        self._children.append(ch)
        self._cval.append(0)
        self._skey.append((kind, tuple(skey[c] for c in ch)))
        val = self._val
        chain = []
        if kind == _ADD:
            acc = val[ch[0]]
            for c in ch[1:]:
                acc = self._binop("add", acc, val[c])
                chain.append(acc)
            self._add_chain.append(tuple(chain))
            self._mul_chain.append(())
        else:
            first = ch[0]
            neg = self._kind[first] == _CONST and self._cval[first] == -1
            rest = ch[1:] if neg else ch
            acc = val[rest[0]]
            for c in rest[1:]:
                acc = self._binop("mul", acc, val[c])
                chain.append(acc)
            if neg:
                acc = self._binop("neg", acc, -1)
            self._add_chain.append(())
            self._mul_chain.append(tuple(chain))
        val.append(acc)
        return nid

    def _make_add(self, children: Sequence[int]) -> int:
        kind, kids, cval = self._kind, self._children, self._cval
        flat: List[int] = []
        const = 0
        for c in children:
            k = kind[c]
            if k == _ADD:
                for g in kids[c]:
                    if kind[g] == _CONST:
                        const += cval[g]
                    else:
                        flat.append(g)
            elif k == _CONST:
                const += cval[c]
            else:
                flat.append(c)
        if const:
            flat.append(self._leaf(_CONST, const))
        if not flat:
            return self._leaf(_CONST, 0)
        if len(flat) == 1:
            return flat[0]
        return self._nary(_ADD, flat)

    def _make_mul(self, children: Sequence[int]) -> int:
        kind, kids, cval = self._kind, self._children, self._cval
        flat: List[int] = []
        const = 1
        for c in children:
            k = kind[c]
            if k == _MUL:
                for g in kids[c]:
                    if kind[g] == _CONST:
                        const *= cval[g]
                    else:
                        flat.append(g)
            elif k == _CONST:
                const *= cval[c]
            else:
                flat.append(c)
        if const == 0:
            return self._leaf(_CONST, 0)
        if not flat:
            return self._leaf(_CONST, const)
        if const != 1:
            flat.append(self._leaf(_CONST, const))
        if len(flat) == 1:
            return flat[0]
        return self._nary(_MUL, flat)

    def _monomial(self, t: int, order: Tuple[int, ...]) -> int:
        e = self._exps[t]
        factors = [self._leaf(_CONST, self._coeffs[t])]
        for v in order:
            if e[v]:
                factors.extend([self._leaf(_VAR, v)] * e[v])
        return self._make_mul(factors)

    def _horner(self, idx: Tuple[int, ...], order: Tuple[int, ...]) -> int:
        # `order` lists exactly the unprocessed variables present in `idx`
        if len(idx) == 1:
            return self._monomial(idx[0], order)
        if not order:
            return self._leaf(_CONST, sum(self._coeffs[t] for t in idx))
        key = (idx, order)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        v, rest = order[0], order[1:]
        exps, masks = self._exps, self._masks
        groups: Dict[int, List[int]] = {}
        for t in idx:
            e = exps[t][v]
            g = groups.get(e)
            if g is None:
                groups[e] = [t]
            else:
                g.append(t)
        powers = sorted(groups)

        def sub(e: int) -> int:
            g = groups[e]
            mask = 0
            for t in g:
                mask |= masks[t]
            return self._horner(tuple(g), tuple(w for w in rest if mask >> w & 1))

        xv = self._leaf(_VAR, v)
        inner = sub(powers[-1])
        for j in range(len(powers) - 2, -1, -1):
            gap = powers[j + 1] - powers[j]
            inner = self._make_add([sub(powers[j]), self._make_mul([xv] * gap + [inner])])
        if powers[0]:
            inner = self._make_mul([xv] * powers[0] + [inner])
        self._memo[key] = inner
        self._memo_size += len(idx)
        return inner

    def _count(self, root: int) -> Tuple[int, int]:
        kind, kids = self._kind, self._children
        add_chain, mul_chain = self._add_chain, self._mul_chain
        adds: set = set()
        muls: set = set()
        seen = {root}
        stack = [root]
        while stack:
            n = stack.pop()
            if kind[n] < _ADD:
                continue
            adds.update(add_chain[n])
            muls.update(mul_chain[n])
            for c in kids[n]:
                if c not in seen and kind[c] >= _ADD:
                    seen.add(c)
                    stack.append(c)
        return len(adds), len(muls)

    def cost_positions(self, order: Tuple[int, ...]) -> Tuple[int, int]:
        """(adds, muls) for an order given as variable positions."""
        hit = self._order_cache.get(order)
        if hit is not None:
            return hit
        self.evaluations += 1
        if self._memo_size > self.memo_limit:
            self._reset()
        if not self._coeffs:
            out = (0, 0)
        else:
            root = self._horner(tuple(range(len(self._coeffs))), order)
            out = self._count(root)
        self._order_cache[order] = out
        return out

    def cost(self, order: Sequence[Variable]) -> OpCount:
        return OpCount(*self.cost_positions(_positions(self._pos, order)))


_INT64_SAFE = 1 << 62


class CostEvaluator:
    """Instruction counts for orders of ``p``, compiled when possible.

    ``backend`` is ``"auto"``, ``"numba"`` or ``"python"``. Results are
    cached per order.
    """

    def __init__(self, p: Polynomial, backend: str = "auto"):
        self.polynomial = p
        self.variables: Tuple[Variable, ...] = p.variables
        self._pos = {v: i for i, v in enumerate(self.variables)}
        self.naive_total = naive_op_count(p).total
        self.evaluations = 0
        self._cache: Dict[Tuple[int, ...], Tuple[int, int]] = {}
        fits = all(abs(c) < _INT64_SAFE for _, c in p.items())
        if backend == "auto":
            backend = "numba" if fits and _numba_available() else "python"
        if backend == "numba" and not fits:
            raise ValueError("coefficients too large for the compiled backend")
        self.backend = backend
        if backend == "numba":
            self._setup_kernel()
        elif backend == "python":
            self._py = PyCostEvaluator(p)
        else:
            raise ValueError(f"unknown backend {backend!r}")

    def _setup_kernel(self) -> None:
        nv = len(self.variables)
        nt = len(self.polynomial)
        exps = np.zeros((nt, nv), dtype=np.int64)
        coeffs = np.zeros(nt, dtype=np.int64)
        for t, (mono, c) in enumerate(self.polynomial.items()):
            coeffs[t] = c
            for v, k in mono:
                exps[t, self._pos[v]] = k
        self._exps = exps
        self._coeffs = coeffs
        self._varkey = np.array([v.id for v in self.variables], dtype=np.int64)
        deg = int(exps.sum(axis=1).max()) if nt else 0
        self._alloc(nodes=max(256, 2 * nt * (nv + 1)), pool=max(1024, 4 * nt * (nv + deg + 2)),
                    scratch=max(64, 2 * nt + deg + 8))

    def _alloc(self, nodes: int, pool: int, scratch: int) -> None:
        def pow2(n):
            return 1 << max(4, int(n - 1).bit_length())

        self._cap = (nodes, pool, scratch)
        self._kind = np.zeros(nodes, dtype=np.int64)
        self._val = np.zeros(nodes, dtype=np.int64)
        self._cstart = np.zeros(nodes, dtype=np.int64)
        self._clen = np.zeros(nodes, dtype=np.int64)
        self._pool = np.zeros(pool, dtype=np.int64)
        self._table = np.full(pow2(2 * nodes + 1), -1, dtype=np.int64)
        self._inp = np.zeros(scratch, dtype=np.int64)
        self._out = np.zeros(scratch, dtype=np.int64)
        self._value = np.zeros(nodes, dtype=np.int64)
        self._stack = np.zeros(pool + nodes, dtype=np.int64)
        nb = pow2(2 * (pool + nodes) + 1)
        self._bkey = np.zeros((nb, 3), dtype=np.int64)
        self._bval = np.full(nb, -1, dtype=np.int64)
        self._cmp_stack = np.zeros((scratch, 3), dtype=np.int64)
        self._frames = np.zeros((len(self.variables) + 2, 10), dtype=np.int64)

    def _kernel_cost(self, order: Tuple[int, ...]) -> Tuple[int, int]:
        from ._kernel import OK, horner_cse_cost

        o = np.asarray(order, dtype=np.int64)
        while True:
            adds, muls, status = horner_cse_cost(
                self._exps, self._coeffs, self._varkey, o,
                self._kind, self._val, self._cstart, self._clen, self._pool,
                self._table, self._inp, self._out, self._value, self._stack,
                self._bkey, self._bval, self._cmp_stack, self._frames,
            )
            if status == OK:
                return int(adds), int(muls)
            nodes, pool, scratch = self._cap
            self._alloc(nodes * 2, pool * 2, scratch * 2)

    def cost_positions(self, order: Tuple[int, ...]) -> Tuple[int, int]:
        """(adds, muls) for an order given as variable positions."""
        hit = self._cache.get(order)
        if hit is not None:
            return hit
        self.evaluations += 1
        if self.backend == "numba":
            out = self._kernel_cost(order)
        else:
            out = self._py.cost_positions(order)
        self._cache[order] = out
        return out

    def cost(self, order: Sequence[Variable]) -> OpCount:
        return OpCount(*self.cost_positions(_positions(self._pos, order)))


def _positions(pos: Dict[Variable, int], order: Sequence[Variable]) -> Tuple[int, ...]:
    # like horner_transform: variables absent from the polynomial are skipped
    if len(set(order)) != len(order):
        raise ValueError("variable order contains duplicates")
    o = tuple(pos[v] for v in order if v in pos)
    if len(o) != len(pos):
        raise ValueError("variable order is missing variables of the polynomial")
    return o


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True
