import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mctshorner import OpCount, Polynomial, Workspace, evaluate, parse_polynomial
from mctshorner.expr import naive_op_count
from mctshorner.horner import Add, Const, Mul, Var, evaluate_dag, horner_transform, make_add, make_mul, to_string, tree_op_count

from conftest import points, polynomials


def test_sample_horner_form(sample):
    p, ws = sample
    d = horner_transform(p, ws.variables)
    assert to_string(d) == "y+x*(-3+5*z+x*(y*(2*z+y*(z*(-3+5*z)))))"
    assert tree_op_count(d) == OpCount(5, 8)


def test_zero_and_constant():
    assert horner_transform(Polynomial(), ()) == Const(0)
    assert horner_transform(Polynomial.constant(7), ()) == Const(7)
    assert tree_op_count(Const(7)) == OpCount(0, 0)


def test_order_validation(sample):
    p, ws = sample
    x, y, z = ws.variables
    with pytest.raises(ValueError, match="missing"):
        horner_transform(p, (x, y))
    with pytest.raises(ValueError, match="duplicates"):
        horner_transform(p, (x, y, z, x))
    # extra variables are allowed and skipped
    w = ws.var("w")
    assert horner_transform(p, (w, x, y, z)) == horner_transform(p, (x, y, z))


def test_sparse_gap_uses_repeated_factors():
    ws = Workspace()
    p = parse_polynomial("2*x^5 + 3*x", ws)
    d = horner_transform(p, ws.variables)
    # x*(3 + 2*x*x*x*x): four muls inside, one outside
    assert tree_op_count(d) == OpCount(1, 5)
    assert to_string(d) == "x*(3+2*x*x*x*x)"


def test_sign_factor_is_free():
    ws = Workspace()
    p = parse_polynomial("-x*y", ws)
    d = horner_transform(p, ws.variables)
    assert d == Mul([Const(-1), Var(ws["x"]), Var(ws["y"])])
    assert tree_op_count(d) == OpCount(0, 1)
    assert to_string(d) == "-x*y"


def test_make_add_and_make_mul_normalize():
    ws = Workspace("ab")
    a, b = (Var(v) for v in ws.variables)
    assert make_add([b, Const(2), a, Const(-2)]) == Add([a, b])
    assert make_add([Const(1), Const(-1)]) == Const(0)
    assert make_add([a]) is a
    assert make_mul([b, Const(1), a]) == Mul([a, b])
    assert make_mul([a, Const(0)]) == Const(0)
    assert make_mul([Const(2), Const(3)]) == Const(6)
    inner = make_mul([a, b])
    assert make_mul([inner, a]).children == (a, a, b)
    s = make_add([make_add([a, b]), Const(3)])
    assert s.children == (Const(3), a, b)


def test_child_order_constant_var_composite():
    ws = Workspace("ab")
    a, b = (Var(v) for v in ws.variables)
    comp = make_add([a, b])
    m = make_mul([comp, b, Const(5), a])
    assert m.children == (Const(5), a, b, comp)


def test_evaluate_dag_shares_work(sample):
    p, ws = sample
    d = horner_transform(p, ws.variables)
    pt = {v: k + 2 for k, v in enumerate(ws.variables)}
    assert evaluate_dag(d, pt) == evaluate(p, pt)
    with pytest.raises(KeyError):
        evaluate_dag(d, {})


@pytest.mark.parametrize("n", [1, 2, 5, 17, 50])
def test_univariate_dense_law(n):
    rng = np.random.default_rng(n)
    ws = Workspace("x")
    x = ws["x"]
    coeffs = [int(c) * int(rng.choice([-1, 1])) for c in rng.integers(2, 100, size=n + 1)]
    p = Polynomial.from_terms((c, {x: k}) for k, c in enumerate(coeffs))
    assert tree_op_count(horner_transform(p, (x,))) == OpCount(n, n)


@given(polynomials(max_vars=4, max_terms=10), st.data())
def test_horner_preserves_value(pv, data):
    p, xs = pv
    order = data.draw(st.permutations(xs))
    d = horner_transform(p, order)
    for _ in range(3):
        pt = data.draw(points(xs))
        assert evaluate_dag(d, pt) == evaluate(p, pt)


@given(polynomials(max_vars=5, max_terms=12), st.data())
def test_horner_never_adds_additions(pv, data):
    p, xs = pv
    order = data.draw(st.permutations(xs))
    assert tree_op_count(horner_transform(p, order)).adds <= naive_op_count(p).adds


@given(polynomials(max_vars=4, max_terms=10), st.data())
def test_horner_deterministic(pv, data):
    p, xs = pv
    order = data.draw(st.permutations(xs))
    a, b = horner_transform(p, order), horner_transform(p, order)
    assert a == b and a.key == b.key and to_string(a) == to_string(b)


@given(polynomials(max_vars=4, max_terms=10, min_terms=1), st.data())
def test_to_string_parses_back(pv, data):
    p, xs = pv
    d = horner_transform(p, data.draw(st.permutations(xs)))
    # expand the rendering with the polynomial parser's arithmetic
    assert _expand(to_string(d), xs) == p


def _expand(text, xs):
    """Tiny recursive-descent evaluator over Polynomial for the rendered form."""
    env = {v.name: Polynomial.variable(v) for v in xs}
    pos = 0

    def peek():
        return text[pos] if pos < len(text) else ""

    def expr():
        nonlocal pos
        acc = Polynomial()
        sign = 1
        while True:
            if peek() == "-":
                sign, pos = -1, pos + 1
            acc = acc + sign * term()
            sign = 1
            if peek() == "+":
                pos += 1
            elif peek() != "-":
                return acc

    def term():
        nonlocal pos
        acc = atom()
        while peek() == "*":
            pos += 1
            acc = acc * atom()
        return acc

    def atom():
        nonlocal pos
        if peek() == "(":
            pos += 1
            out = expr()
            assert peek() == ")"
            pos += 1
            return out
        if peek() == "-":
            pos += 1
            return -atom()
        start = pos
        while pos < len(text) and (text[pos].isalnum() or text[pos] == "_"):
            pos += 1
        tok = text[start:pos]
        return Polynomial.constant(int(tok)) if tok.isdigit() else env[tok]

    out = expr()
    assert pos == len(text)
    return out
