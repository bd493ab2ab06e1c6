"""Benchmark polynomial generators.

``resultant(m, n)`` expands the Sylvester determinant of two generic
univariate polynomials ``a(x) = a_0 + ... + a_m x^m`` and
``b(x) = b_0 + ... + b_n x^n`` into a polynomial in the ``m + n + 2``
coefficient variables. ``structured_random`` builds polynomials with a lot of
shared substructure, as a stand-in for inputs from physics calculations.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from .expr import Polynomial, Variable, Workspace, format_polynomial, parse_polynomial

__all__ = [
    "SymbolicMatrix",
    "ResourceLimitError",
    "sylvester_matrix",
    "resultant",
    "resultant_variables",
    "structured_random",
    "cached_resultant",
    "CACHE_ENV",
]

CACHE_ENV = "MCTSHORNER_CACHE"

DEFAULT_TERM_CAP = 2_000_000


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class SymbolicMatrix:
    rows: int
    cols: int
    entries: Tuple[Tuple[Polynomial, ...], ...]

    def __getitem__(self, idx) -> Polynomial:
        i, j = idx
        return self.entries[i][j]


def resultant_variables(m: int, n: int, workspace: Workspace) -> Tuple[Tuple[Variable, ...], Tuple[Variable, ...]]:
    """Intern ``a0..am`` then ``b0..bn`` and return both tuples."""
    a = tuple(workspace.var(f"a{i}") for i in range(m + 1))
    b = tuple(workspace.var(f"b{i}") for i in range(n + 1))
    return a, b


def sylvester_matrix(m: int, n: int, workspace: Workspace) -> SymbolicMatrix:
    if m < 1 or n < 1:
        raise ValueError("degrees must be >= 1")
    a, b = resultant_variables(m, n, workspace)
    size = m + n
    zero = Polynomial()
    rows: List[Tuple[Polynomial, ...]] = []
    for coeffs, count in ((a, n), (b, m)):
        for r in range(count):
            row = [zero] * size
            # highest coefficient first
            for k, v in enumerate(reversed(coeffs)):
                row[r + k] = Polynomial.variable(v)
            rows.append(tuple(row))
    return SymbolicMatrix(size, size, tuple(rows))


def _determinant(mat: SymbolicMatrix, term_cap: int) -> Polynomial:
    size = mat.rows
    memo: Dict[int, Polynomial] = {}

    # det of the bottom |cols| rows restricted to column set `cols` (bitmask)
    def minor(cols: int) -> Polynomial:
        hit = memo.get(cols)
        if hit is not None:
            return hit
        k = bin(cols).count("1")
        row = size - k
        if k == 1:
            j = cols.bit_length() - 1
            out = mat[row, j]
        else:
            out = Polynomial()
            sign = 1
            for j in range(size):
                bit = 1 << j
                if not cols & bit:
                    continue
                entry = mat[row, j]
                if not entry.is_zero:
                    sub = minor(cols & ~bit)
                    if not sub.is_zero:
                        prod = entry * sub
                        out = out + prod if sign > 0 else out - prod
                        if len(out) > term_cap:
                            raise ResourceLimitError(
                                f"determinant exceeded {term_cap} terms"
                            )
                sign = -sign
        memo[cols] = out
        return out

    return minor((1 << size) - 1)


def resultant(m: int, n: int, workspace: Workspace, term_cap: int = DEFAULT_TERM_CAP) -> Polynomial:
    """Determinant of the Sylvester matrix, by memoized expansion along rows."""
    if m + n > 13:
        raise ResourceLimitError("resultants with m + n > 13 are not supported")
    return _determinant(sylvester_matrix(m, n, workspace), term_cap)


def cached_resultant(m: int, n: int, workspace: Workspace, cache_dir: Optional[os.PathLike] = None) -> Polynomial:
    """:func:`resultant` backed by ``res_<m>_<n>.poly`` files.

    The cache directory defaults to ``$MCTSHORNER_CACHE``; with neither set
    the polynomial is computed without touching disk.
    """
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV)
    # intern variables up front so ids do not depend on file contents
    resultant_variables(m, n, workspace)
    if not cache_dir:
        return resultant(m, n, workspace)
    path = Path(cache_dir) / f"res_{m}_{n}.poly"
    if path.exists():
        return parse_polynomial(path.read_text(encoding="utf-8"), workspace)
    p = resultant(m, n, workspace)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(f"# resultant {m} {n}\n{format_polynomial(p)}\n", encoding="utf-8")
    tmp.replace(path)
    return p


def structured_random(
    num_vars: int,
    num_terms: int,
    max_degree: int,
    seed: int,
    workspace: Optional[Workspace] = None,
    pool_size: Optional[int] = None,
    max_coeff: int = 5,
) -> Polynomial:
    """Random polynomial whose terms reuse monomial factors from a small pool.

    Each term is ``c * f * g`` where ``f`` is drawn from the shared pool and
    ``g`` is a free monomial of degree 0 or 1, keeping the total degree at
    most ``max_degree``. Variables are named ``x0 .. x{num_vars-1}``.
    """
    if min(num_vars, num_terms, max_degree) < 1:
        raise ValueError("parameters must be positive")
    ws = workspace if workspace is not None else Workspace()
    xs = [ws.var(f"x{i}") for i in range(num_vars)]
    rng = np.random.default_rng(seed)
    if pool_size is None:
        pool_size = max(1, num_terms // 4)

    def monomial(deg: int) -> Dict[Variable, int]:
        exps: Dict[Variable, int] = {}
        for i in rng.integers(0, num_vars, size=deg):
            v = xs[int(i)]
            exps[v] = exps.get(v, 0) + 1
        return exps

    fdeg_max = max(1, max_degree - 1)
    pool = [monomial(int(rng.integers(1, fdeg_max + 1))) for _ in range(pool_size)]

    terms: Dict[Tuple[Tuple[Variable, int], ...], int] = {}
    attempts = 0
    while len(terms) < num_terms and attempts < 50 * num_terms:
        attempts += 1
        f = pool[int(rng.integers(0, pool_size))]
        exps = dict(f)
        if sum(exps.values()) < max_degree and rng.random() < 0.75:
            v = xs[int(rng.integers(0, num_vars))]
            exps[v] = exps.get(v, 0) + 1
        mono = tuple(sorted(exps.items()))
        if mono in terms:
            continue
        c = int(rng.integers(1, max_coeff + 1))
        if rng.random() < 0.5:
            c = -c
        terms[mono] = c
    return Polynomial(terms)
