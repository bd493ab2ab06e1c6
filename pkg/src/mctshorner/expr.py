"""Sparse multivariate polynomials with exact integer coefficients.

A :class:`Polynomial` maps monomials to nonzero integer coefficients. A
monomial is a tuple of ``(Variable, exponent)`` pairs sorted by variable id,
with every exponent >= 1; the empty tuple is the constant monomial.

Variables are interned by a :class:`Workspace`, which hands out dense ids in
order of first use. Polynomials built from different workspaces must not be
mixed.

Operation counts follow one convention throughout the package: additions
and multiplications cost 1 each, multiplying by +1 or -1 is free and
negation is folded into coefficients.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

__all__ = [
    "Variable",
    "Workspace",
    "Term",
    "Polynomial",
    "OpCount",
    "Rational",
    "ParseError",
    "parse_polynomial",
    "format_polynomial",
    "naive_op_count",
    "term_op_count",
    "evaluate",
    "occurrence_counts",
]

# exact evaluation points
Rational = Fraction

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, order=True)
class Variable:
    id: int
    name: str

    def __repr__(self) -> str:
        return self.name

    __str__ = __repr__


class Workspace:
    """Variable interner. Ids are contiguous from 0, one per distinct name."""

    def __init__(self, names: Iterable[str] = ()):
        self._lock = threading.Lock()
        self._by_name: Dict[str, Variable] = {}
        self._by_id: List[Variable] = []
        for name in names:
            self.var(name)

    def var(self, name: str) -> Variable:
        v = self._by_name.get(name)
        if v is not None:
            return v
        if not _NAME_RE.match(name):
            raise ValueError(f"invalid variable name {name!r}")
        with self._lock:
            v = self._by_name.get(name)
            if v is None:
                v = Variable(len(self._by_id), name)
                self._by_id.append(v)
                self._by_name[name] = v
        return v

    def vars(self, *names: str) -> Tuple[Variable, ...]:
        return tuple(self.var(n) for n in names)

    def __getitem__(self, key) -> Variable:
        if isinstance(key, int):
            return self._by_id[key]
        return self._by_name[key]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self._by_id)

    @property
    def variables(self) -> Tuple[Variable, ...]:
        return tuple(self._by_id)


Monomial = Tuple[Tuple[Variable, int], ...]


@dataclass(frozen=True)
class Term:
    coeff: int
    monomial: Monomial

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.monomial)

    def exponent(self, v: Variable) -> int:
        for w, e in self.monomial:
            if w == v:
                return e
        return 0


@dataclass(frozen=True)
class OpCount:
    adds: int = 0
    muls: int = 0

    @property
    def total(self) -> int:
        return self.adds + self.muls

    def __add__(self, other: "OpCount") -> "OpCount":
        return OpCount(self.adds + other.adds, self.muls + other.muls)

    def as_dict(self) -> Dict[str, int]:
        return {"adds": self.adds, "muls": self.muls, "total": self.total}


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps: Dict[Variable, int] = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class Polynomial:
    """Immutable canonical sparse polynomial over the integers."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, int]] = None):
        # callers outside this module go through from_terms / arithmetic,
        # which guarantee canonical monomials
        self._terms: Dict[Monomial, int] = (
            {m: c for m, c in terms.items() if c != 0} if terms else {}
        )
        self._hash: Optional[int] = None

    @classmethod
    def from_terms(cls, terms: Iterable[Tuple[int, Mapping[Variable, int]]]) -> "Polynomial":
        """Build from ``(coeff, {var: exponent})`` pairs, merging like terms."""
        acc: Dict[Monomial, int] = {}
        for coeff, exps in terms:
            items = []
            for v, e in exps.items():
                if e < 0:
                    raise ValueError(f"negative exponent for {v}")
                if e:
                    items.append((v, int(e)))
            mono = tuple(sorted(items))
            acc[mono] = acc.get(mono, 0) + int(coeff)
        return cls(acc)

    @classmethod
    def constant(cls, c: int) -> "Polynomial":
        return cls({(): int(c)})

    @classmethod
    def variable(cls, v: Variable) -> "Polynomial":
        return cls({((v, 1),): 1})

    # --- container protocol -------------------------------------------------

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator[Term]:
        for m, c in self._terms.items():
            yield Term(c, m)

    def items(self):
        return self._terms.items()

    def coeff(self, monomial: Monomial) -> int:
        return self._terms.get(monomial, 0)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def variables(self) -> Tuple[Variable, ...]:
        seen = set()
        for m in self._terms:
            for v, _ in m:
                seen.add(v)
        return tuple(sorted(seen))

    def degree(self, v: Optional[Variable] = None) -> int:
        if not self._terms:
            return -1
        if v is None:
            return max(sum(e for _, e in m) for m in self._terms)
        return max(dict(m).get(v, 0) for m in self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # --- arithmetic -----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, int):
            return Polynomial.constant(other)
        if isinstance(other, Variable):
            return Polynomial.variable(other)
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out: Dict[Monomial, int] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1)
        for _ in range(k):
            result = result * self
        return result

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)!r})"

    def __str__(self) -> str:
        return format_polynomial(self)


# --- parsing ------------------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    """Split into (kind, value, byte_offset) tokens; ``#`` starts a comment."""
    tokens = []
    raw = text.encode("utf-8")
    is_ascii = len(raw) == len(text)
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:  # trailing whitespace
            break
        if m.group(1) is not None:
            kind, val, start = "int", m.group(1), m.start(1)
        elif m.group(2) is not None:
            kind, val, start = "name", m.group(2), m.start(2)
        elif m.group(3) is not None:
            val, start = m.group(3), m.start(3)
            if val == "#":
                end = text.find("\n", start)
                pos = n if end < 0 else end
                continue
            if val.isspace():
                pos = m.end()
                continue
            kind = "op"
        else:
            break
        tokens.append((kind, val, start if is_ascii else len(text[:start].encode("utf-8"))))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


def parse_polynomial(text: str, workspace: Workspace) -> Polynomial:
    """Parse ``[+-] term ([+-] term)*`` where a term is ``factor (* factor)*``.

    A factor is an integer or ``name`` / ``name^k``. ``*`` is mandatory
    between factors. Offsets in :class:`ParseError` are UTF-8 byte offsets.
    """
    toks = _tokenize(text)
    i = 0
    terms: List[Tuple[int, Dict[Variable, int]]] = []

    def peek():
        return toks[i]

    def parse_factor(coeff_exps):
        nonlocal i
        kind, val, off = toks[i]
        if kind == "int":
            i += 1
            coeff_exps[0] *= int(val)
        elif kind == "name":
            i += 1
            v = workspace.var(val)
            exp = 1
            if toks[i][:2] == ("op", "^"):
                i += 1
                if toks[i][:2] == ("op", "-"):
                    raise ParseError("negative exponent", toks[i][2])
                if toks[i][0] != "int":
                    raise ParseError("expected exponent", toks[i][2])
                exp = int(toks[i][1])
                i += 1
            coeff_exps[1][v] = coeff_exps[1].get(v, 0) + exp
        else:
            raise ParseError(f"unexpected {val!r}" if val else "unexpected end of input", off)

    first = True
    while True:
        kind, val, off = peek()
        sign = 1
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
        elif not first:
            if kind == "end":
                break
            raise ParseError(f"expected '+' or '-', got {val!r}", off)
        elif kind == "end":
            break  # empty input is the zero polynomial
        acc = [sign, {}]
        parse_factor(acc)
        while peek()[:2] == ("op", "*"):
            i += 1
            parse_factor(acc)
        terms.append((acc[0], acc[1]))
        first = False
        if peek()[0] == "end":
            break
    return Polynomial.from_terms(terms)


def _term_sort_key(item):
    mono, _ = item
    return (-sum(e for _, e in mono), [(v.id, -e) for v, e in mono])


def format_polynomial(p: Polynomial) -> str:
    """Render in the text format accepted by :func:`parse_polynomial`."""
    if p.is_zero:
        return "0"
    parts = []
    for mono, c in sorted(p.items(), key=_term_sort_key):
        factors = [v.name if e == 1 else f"{v.name}^{e}" for v, e in mono]
        if abs(c) != 1 or not factors:
            factors.insert(0, str(abs(c)))
        body = "*".join(factors)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


# --- counting and evaluation ---------------------------------------------------


def term_op_count(term: Term) -> int:
    """Multiplications needed for one term on its own."""
    deg = term.degree
    return (deg - 1 if deg >= 1 else 0) + (1 if abs(term.coeff) != 1 else 0)


def naive_op_count(p: Polynomial) -> OpCount:
    """Cost of evaluating ``p`` term by term with repeated multiplication."""
    muls = sum(term_op_count(t) for t in p)
    return OpCount(adds=max(0, len(p) - 1), muls=muls)


def evaluate(p: Polynomial, point: Mapping[Variable, Fraction]) -> Fraction:
    total = Fraction(0)
    for mono, c in p.items():
        val = Fraction(c)
        for v, e in mono:
            try:
                x = point[v]
            except KeyError:
                raise KeyError(f"no value for variable {v.name}") from None
            val *= Fraction(x) ** e
        total += val
    return total


def occurrence_counts(p: Polynomial, variables: Iterable[Variable] = ()) -> Dict[Variable, int]:
    """Number of terms each variable appears in.

    Variables passed in ``variables`` but absent from ``p`` get a count of 0.
    """
    counts = {v: 0 for v in variables}
    for mono in p._terms:
        for v, _ in mono:
            counts[v] = counts.get(v, 0) + 1
    return counts
