"""Renderers for optimized code: three-address text, C source and JSON stats.

TAC format, one instruction per line::

    t0 = -3 + z          # add
    t1 = 5 * t0          # mul
    t2 = -t1             # neg (sign only, free)
    result = t2

Temporaries are ``t<k>``. Variables whose names look like temporaries are
rejected rather than silently misread on the way back in.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .cse import ADD, MUL, NEG, Instruction, InstructionSeq, Operand, Temp
from .expr import OpCount, Variable, Workspace
from .horner import Const, Var

__all__ = [
    "STATS_SCHEMA",
    "StatsReport",
    "TacParseError",
    "emit_tac",
    "parse_tac",
    "emit_c_like",
    "emit_stats",
    "sweep_csv",
    "SWEEP_HEADER",
]

STATS_SCHEMA = "mctshorner.stats/1"
SWEEP_HEADER = ("cp", "N", "seed", "best_total")

_RESERVED_RE = re.compile(r"t\d+\Z|result\Z")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_C_KEYWORDS = frozenset(
    "auto break case char const continue default do double else enum extern float for goto if "
    "inline int long register restrict return short signed sizeof static struct switch typedef "
    "union unsigned void volatile while".split()
)


class TacParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _check_names(s: InstructionSeq) -> None:
    for v in s.variables:
        if _RESERVED_RE.match(v.name):
            raise ValueError(f"variable name {v.name!r} clashes with temporaries")


def _operand(o: Operand) -> str:
    if isinstance(o, Const):
        return str(o.value)
    if isinstance(o, Var):
        return o.var.name
    return f"t{o.id}"


def emit_tac(s: InstructionSeq) -> str:
    _check_names(s)
    lines = []
    for ins in s.instructions:
        if ins.op == NEG:
            lines.append(f"t{ins.dest} = -{_operand(ins.lhs)}")
        else:
            sym = "+" if ins.op == ADD else "*"
            lines.append(f"t{ins.dest} = {_operand(ins.lhs)} {sym} {_operand(ins.rhs)}")
    lines.append(f"result = {_operand(s.result)}")
    return "\n".join(lines) + "\n"


_BIN_RE = re.compile(r"t(\d+) = (\S+) ([+*]) (\S+)\Z")
_NEG_RE = re.compile(r"t(\d+) = -([A-Za-z_]\w*)\Z")
_RES_RE = re.compile(r"result = (\S+)\Z")
_INT_RE = re.compile(r"-?\d+\Z")


def parse_tac(text: str, workspace: Workspace) -> InstructionSeq:
    """Read :func:`emit_tac` output back; variables are interned in ``workspace``."""
    instructions: List[Instruction] = []
    result: Optional[Operand] = None

    def operand(tok: str, lineno: int) -> Operand:
        if _INT_RE.match(tok):
            return Const(int(tok))
        if _RESERVED_RE.match(tok) and tok != "result":
            k = int(tok[1:])
            if k >= len(instructions):
                raise TacParseError(f"temporary {tok} used before definition", lineno)
            return Temp(k)
        if not _IDENT_RE.match(tok):
            raise TacParseError(f"bad operand {tok!r}", lineno)
        return Var(workspace.var(tok))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if result is not None:
            raise TacParseError("text after result line", lineno)
        m = _RES_RE.match(line)
        if m:
            result = operand(m.group(1), lineno)
            continue
        m = _BIN_RE.match(line) or _NEG_RE.match(line)
        if not m:
            raise TacParseError(f"cannot parse {line!r}", lineno)
        dest = int(m.group(1))
        if dest != len(instructions):
            raise TacParseError(f"expected t{len(instructions)}, got t{dest}", lineno)
        if m.re is _NEG_RE:
            instructions.append(Instruction(dest, NEG, operand(m.group(2), lineno)))
        else:
            op = ADD if m.group(3) == "+" else MUL
            instructions.append(Instruction(dest, op, operand(m.group(2), lineno), operand(m.group(4), lineno)))
    if result is None:
        raise TacParseError("missing result line", len(text.splitlines()) + 1)
    return InstructionSeq(tuple(instructions), result)


def emit_c_like(s: InstructionSeq, name: str = "poly", variables: Optional[Sequence[Variable]] = None) -> str:
    """A self-contained C function evaluating ``s`` in double precision.

    Parameters are ``variables`` (default: the variables ``s`` uses), in id
    order. Every instruction becomes one statement, followed by the return.
    """
    if not _IDENT_RE.match(name) or name in _C_KEYWORDS:
        raise ValueError(f"invalid function name {name!r}")
    _check_names(s)
    params = sorted(variables if variables is not None else s.variables)
    for v in params:
        if v.name in _C_KEYWORDS:
            raise ValueError(f"variable name {v.name!r} is a C keyword")

    def c_operand(o: Operand) -> str:
        if isinstance(o, Const):
            return f"{o.value}.0" if o.value >= 0 else f"({o.value}.0)"
        return _operand(o)

    out = [
        "/* Generated straight-line evaluation in double precision.",
        "   Rounding may differ from exact rational evaluation. */",
        f"double {name}({', '.join('double ' + v.name for v in params) or 'void'})",
        "{",
    ]
    for ins in s.instructions:
        if ins.op == NEG:
            rhs = f"-{c_operand(ins.lhs)}"
        else:
            sym = "+" if ins.op == ADD else "*"
            rhs = f"{c_operand(ins.lhs)} {sym} {c_operand(ins.rhs)}"
        out.append(f"    const double t{ins.dest} = {rhs};")
    out.append(f"    return {c_operand(s.result)};")
    out.append("}")
    return "\n".join(out) + "\n"


@dataclass
class StatsReport:
    """Counts for one pipeline run plus the configuration that produced it.

    ``horner`` and ``cse`` are ``None`` for count-only runs. ``wall_time``
    is left out of the JSON unless set, which keeps reruns byte-identical.
    """

    naive: OpCount
    horner: Optional[OpCount] = None
    cse: Optional[OpCount] = None
    order: Tuple[str, ...] = ()
    config: Dict[str, Any] = field(default_factory=dict)
    trace: List[int] = field(default_factory=list)
    wall_time: Optional[float] = None

    def as_dict(self) -> Dict[str, Any]:
        d: Dict[str, Any] = {"schema": STATS_SCHEMA, "config": dict(self.config)}
        d["naive"] = self.naive.as_dict()
        d["naive_total"] = self.naive.total
        if self.horner is not None:
            d["horner"] = self.horner.as_dict()
            d["horner_total"] = self.horner.total
        if self.cse is not None:
            d["cse"] = self.cse.as_dict()
            d["cse_total"] = self.cse.total
        d["order"] = list(self.order)
        d["trace"] = list(self.trace)
        if self.wall_time is not None:
            d["wall_time"] = self.wall_time
        return d


def emit_stats(report: StatsReport) -> str:
    return json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"


def sweep_csv(rows: Iterable[Tuple[float, int, int, int]]) -> str:
    """CSV with header ``cp,N,seed,best_total``; ``cp`` uses ``repr`` so it round-trips."""
    lines = [",".join(SWEEP_HEADER)]
    for cp, n, seed, best in rows:
        lines.append(f"{float(cp)!r},{int(n)},{int(seed)},{int(best)}")
    return "\n".join(lines) + "\n"
