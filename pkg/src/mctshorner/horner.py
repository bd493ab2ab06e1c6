"""Multivariate Horner transform into n-ary expression trees.

Expression nodes are immutable. ``Add`` and ``Mul`` are kept flat (no Add
directly under Add, no Mul under Mul) and their children are sorted by a
structural key: constants first, then variables by id, then composite nodes.
The only ``Const`` allowed inside a ``Mul`` is a coefficient whose absolute
value is not 1, or ``Const(-1)`` standing for a sign.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple, Union

from .expr import OpCount, Polynomial, Variable

__all__ = [
    "Const",
    "Var",
    "Add",
    "Mul",
    "Node",
    "VariableOrder",
    "make_add",
    "make_mul",
    "horner_transform",
    "tree_op_count",
    "to_string",
    "evaluate_dag",
]

VariableOrder = Tuple[Variable, ...]


class Const:
    __slots__ = ("value", "key", "_hash")

    def __init__(self, value: int):
        self.value = int(value)
        self.key = (0, self.value)
        self._hash = hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Const) and other.value == self.value

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Const({self.value})"


class Var:
    __slots__ = ("var", "key", "_hash")

    def __init__(self, var: Variable):
        self.var = var
        self.key = (1, var.id)
        self._hash = hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Var) and other.var == self.var

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.var.name})"


class _Nary:
    __slots__ = ("children", "key", "_hash")
    tag = -1

    def __init__(self, children: Sequence["Node"]):
        if len(children) < 2:
            raise ValueError(f"{type(self).__name__} needs at least 2 children")
        self.children = tuple(children)
        # nested tuples share the children's keys, so this is O(len(children))
        self.key = (self.tag, tuple(c.key for c in self.children))
        self._hash = hash((self.tag, tuple(c._hash for c in self.children)))

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is type(self) and other._hash == self._hash and other.key == self.key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(repr, self.children))})"


class Add(_Nary):
    __slots__ = ()
    tag = 2


class Mul(_Nary):
    __slots__ = ()
    tag = 3


Node = Union[Const, Var, Add, Mul]


def _sort_key(node):
    return node.key


def make_add(children: Sequence[Node]) -> Node:
    """Flattened, sorted sum. Constant children are summed into one."""
    flat: List[Node] = []
    const = 0
    for c in children:
        if isinstance(c, Add):
            for g in c.children:
                if isinstance(g, Const):
                    const += g.value
                else:
                    flat.append(g)
        elif isinstance(c, Const):
            const += c.value
        else:
            flat.append(c)
    if const:
        flat.append(Const(const))
    if not flat:
        return Const(0)
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=_sort_key)
    return Add(flat)


def make_mul(children: Sequence[Node]) -> Node:
    """Flattened, sorted product. Constants are multiplied into one; 1 is dropped."""
    flat: List[Node] = []
    const = 1
    for c in children:
        if isinstance(c, Mul):
            for g in c.children:
                if isinstance(g, Const):
                    const *= g.value
                else:
                    flat.append(g)
        elif isinstance(c, Const):
            const *= c.value
        else:
            flat.append(c)
    if const == 0:
        return Const(0)
    if not flat:
        return Const(const)
    if const != 1:
        flat.append(Const(const))
    if len(flat) == 1:
        return flat[0]
    flat.sort(key=_sort_key)
    return Mul(flat)


def _monomial_node(coeff: int, mono) -> Node:
    factors: List[Node] = [Const(coeff)]
    for v, e in mono:
        factors.extend(Var(v) for _ in range(e))
    return make_mul(factors)


def _horner(terms: List[Tuple[int, tuple]], order: Sequence[Variable]) -> Node:
    if len(terms) == 1:
        coeff, mono = terms[0]
        return _monomial_node(coeff, mono)
    present = set()
    for _, mono in terms:
        for v, _e in mono:
            present.add(v)
    rest = [v for v in order if v in present]
    if not rest:
        return Const(sum(c for c, _ in terms))
    v, rest = rest[0], rest[1:]
    groups: Dict[int, List[Tuple[int, tuple]]] = {}
    for coeff, mono in terms:
        e = 0
        stripped = mono
        for i, (w, k) in enumerate(mono):
            if w == v:
                e = k
                stripped = mono[:i] + mono[i + 1:]
                break
        groups.setdefault(e, []).append((coeff, stripped))
    exps = sorted(groups)
    xv = Var(v)
    # innermost level first: c_{e_k}, then c_{e_j} + v^(e_{j+1}-e_j) * inner
    inner = _horner(groups[exps[-1]], rest)
    for j in range(len(exps) - 2, -1, -1):
        gap = exps[j + 1] - exps[j]
        inner = make_add([_horner(groups[exps[j]], rest), make_mul([xv] * gap + [inner])])
    if exps[0]:
        inner = make_mul([xv] * exps[0] + [inner])
    return inner


def horner_transform(p: Polynomial, order: Sequence[Variable]) -> Node:
    """Nested Horner form of ``p`` extracting variables in ``order``.

    ``order[0]`` is factored out first and ends up outermost. Variables in
    ``order`` that do not occur in a sub-polynomial are skipped there.
    """
    order = tuple(order)
    if len(set(order)) != len(order):
        raise ValueError("variable order contains duplicates")
    missing = set(p.variables) - set(order)
    if missing:
        names = ", ".join(sorted(v.name for v in missing))
        raise ValueError(f"variable order is missing {names}")
    if p.is_zero:
        return Const(0)
    return _horner([(c, m) for m, c in p.items()], order)


def tree_op_count(node: Node) -> OpCount:
    """Adds and muls of the expression read as a tree.

    Shared subtrees are counted at every occurrence. A ``Const(-1)`` factor
    in a ``Mul`` is a sign and costs nothing.
    """
    memo: Dict[int, Tuple[int, int]] = {}

    def walk(n) -> Tuple[int, int]:
        if isinstance(n, (Const, Var)):
            return (0, 0)
        key = id(n)
        hit = memo.get(key)
        if hit is not None:
            return hit
        adds = muls = 0
        for c in n.children:
            a, m = walk(c)
            adds += a
            muls += m
        k = len(n.children) - 1
        if isinstance(n, Add):
            adds += k
        else:
            if any(isinstance(c, Const) and c.value == -1 for c in n.children):
                k -= 1
            muls += k
        memo[key] = (adds, muls)
        return adds, muls

    adds, muls = walk(node)
    return OpCount(adds, muls)


def _atom_str(n: Node) -> str:
    if isinstance(n, Const):
        return str(n.value)
    if isinstance(n, Var):
        return n.var.name
    return "(" + to_string(n) + ")"


def _mul_str(children: Sequence[Node]) -> str:
    if len(children) == 1:
        c = children[0]
        return to_string(c) if isinstance(c, Mul) else _atom_str(c)
    head, rest = children[0], children[1:]
    if all(isinstance(c, (Const, Var)) for c in rest):
        return "*".join(_atom_str(c) for c in children)
    if len(rest) == 1:
        return _atom_str(head) + "*" + _atom_str(rest[0])
    return _atom_str(head) + "*(" + _mul_str(rest) + ")"


def to_string(node: Node) -> str:
    """Parenthesized Horner-style rendering, e.g. ``y+x*(-3+5*z+...)``.

    Leading factors of a product nest to the right, so ``Mul(x, y, A)``
    prints as ``x*(y*(A))``. A sign factor prints as a leading ``-``.
    """
    if isinstance(node, (Const, Var)):
        return _atom_str(node)
    if isinstance(node, Add):
        out = ""
        for i, c in enumerate(node.children):
            s = to_string(c)
            if i and not s.startswith("-"):
                out += "+"
            out += s
        return out
    children = list(node.children)
    if isinstance(children[0], Const) and children[0].value == -1:
        return "-" + _mul_str(children[1:])
    return _mul_str(children)


def evaluate_dag(node: Node, point: Mapping[Variable, Fraction]) -> Fraction:
    memo: Dict[int, Fraction] = {}

    def walk(n) -> Fraction:
        if isinstance(n, Const):
            return Fraction(n.value)
        if isinstance(n, Var):
            try:
                return Fraction(point[n.var])
            except KeyError:
                raise KeyError(f"no value for variable {n.var.name}") from None
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        vals = [walk(c) for c in n.children]
        if isinstance(n, Add):
            out = sum(vals, Fraction(0))
        else:
            out = Fraction(1)
            for x in vals:
                out *= x
        memo[id(n)] = out
        return out

    return walk(node)
