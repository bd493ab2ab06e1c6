"""Common subexpression elimination to straight-line three-address code.

Every n-ary node is binarized into a left-associated chain over its (already
canonically sorted) children. Binary operations are hash-consed on
``(op, lhs, rhs)`` with commutative operands put in canonical order first,
so identical chains and chain prefixes are computed once.

Negation is an explicit ``neg`` instruction. It exists only to carry signs
and is free under the package cost convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .expr import OpCount, Variable
from .horner import Add, Const, Node, Var, make_add, make_mul

__all__ = [
    "Temp",
    "Operand",
    "Instruction",
    "InstructionSeq",
    "cse",
    "instruction_count",
    "replay",
    "to_dag",
    "ADD",
    "MUL",
    "NEG",
]

ADD = "add"
MUL = "mul"
NEG = "neg"


class Temp:
    __slots__ = ("id", "key")

    def __init__(self, id: int):
        self.id = id
        self.key = (4, id)

    def __eq__(self, other):
        return isinstance(other, Temp) and other.id == self.id

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"t{self.id}"


Operand = Union[Const, Var, Temp]


@dataclass(frozen=True)
class Instruction:
    dest: int
    op: str
    lhs: Operand
    rhs: Optional[Operand] = None

    def __str__(self) -> str:
        if self.op == NEG:
            return f"t{self.dest} = -{_operand_str(self.lhs)}"
        sym = "+" if self.op == ADD else "*"
        return f"t{self.dest} = {_operand_str(self.lhs)} {sym} {_operand_str(self.rhs)}"


def _operand_str(o: Operand) -> str:
    if isinstance(o, Const):
        return str(o.value)
    if isinstance(o, Var):
        return o.var.name
    return f"t{o.id}"


@dataclass(frozen=True)
class InstructionSeq:
    instructions: Tuple[Instruction, ...]
    result: Operand

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    @property
    def variables(self) -> Tuple[Variable, ...]:
        seen = set()
        for ins in self.instructions:
            for o in (ins.lhs, ins.rhs):
                if isinstance(o, Var):
                    seen.add(o.var)
        if isinstance(self.result, Var):
            seen.add(self.result.var)
        return tuple(sorted(seen))

    def __str__(self) -> str:
        lines = [str(i) for i in self.instructions]
        lines.append(f"result = {_operand_str(self.result)}")
        return "\n".join(lines)


def cse(d: Node) -> InstructionSeq:
    instructions: List[Instruction] = []
    table: Dict[tuple, Temp] = {}
    done: Dict[Node, Operand] = {}

    def emit(op: str, a: Operand, b: Optional[Operand] = None) -> Temp:
        if b is not None and b.key < a.key:
            a, b = b, a
        key = (op, a, b)
        t = table.get(key)
        if t is None:
            t = Temp(len(instructions))
            instructions.append(Instruction(t.id, op, a, b))
            table[key] = t
        return t

    def chain(op: str, children) -> Operand:
        ops = [visit(c) for c in children]
        acc = ops[0]
        for o in ops[1:]:
            acc = emit(op, acc, o)
        return acc

    def visit(n: Node) -> Operand:
        if isinstance(n, (Const, Var)):
            return n
        hit = done.get(n)
        if hit is not None:
            return hit
        if isinstance(n, Add):
            out = chain(ADD, n.children)
        else:
            first = n.children[0]
            if isinstance(first, Const) and first.value == -1:
                out = emit(NEG, chain(MUL, n.children[1:]))
            else:
                out = chain(MUL, n.children)
        done[n] = out
        return out

    result = visit(d)
    return InstructionSeq(tuple(instructions), result)


def instruction_count(s: InstructionSeq) -> OpCount:
    adds = muls = 0
    for ins in s.instructions:
        if ins.op == ADD:
            adds += 1
        elif ins.op == MUL:
            muls += 1
    return OpCount(adds, muls)


def replay(s: InstructionSeq, point: Mapping[Variable, Fraction]) -> Fraction:
    temps: Dict[int, Fraction] = {}

    def value(o: Operand) -> Fraction:
        if isinstance(o, Const):
            return Fraction(o.value)
        if isinstance(o, Var):
            try:
                return Fraction(point[o.var])
            except KeyError:
                raise KeyError(f"no value for variable {o.var.name}") from None
        return temps[o.id]

    for ins in s.instructions:
        a = value(ins.lhs)
        if ins.op == ADD:
            temps[ins.dest] = a + value(ins.rhs)
        elif ins.op == MUL:
            temps[ins.dest] = a * value(ins.rhs)
        else:
            temps[ins.dest] = -a
    return value(s.result)


def to_dag(s: InstructionSeq) -> Node:
    """Rebuild a flattened expression from straight-line code."""
    env: Dict[int, Node] = {}

    def node(o: Operand) -> Node:
        return env[o.id] if isinstance(o, Temp) else o

    for ins in s.instructions:
        a = node(ins.lhs)
        if ins.op == ADD:
            env[ins.dest] = make_add([a, node(ins.rhs)])
        elif ins.op == MUL:
            env[ins.dest] = make_mul([a, node(ins.rhs)])
        else:
            env[ins.dest] = make_mul([Const(-1), a])
    return node(s.result)
