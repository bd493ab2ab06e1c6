import threading
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mctshorner import OpCount, ParseError, Polynomial, Workspace, evaluate, format_polynomial, parse_polynomial
from mctshorner.expr import naive_op_count, occurrence_counts, term_op_count

from conftest import points, polynomials


def test_workspace_interns_in_order():
    ws = Workspace("xyz")
    x, y, z = ws.variables
    assert (x.id, y.id, z.id) == (0, 1, 2)
    assert ws.var("y") is y
    assert ws["z"] is z and ws[0] is x
    assert "x" in ws and "w" not in ws
    with pytest.raises(ValueError):
        ws.var("2bad")


def test_workspace_concurrent_interning():
    ws = Workspace()
    names = [f"v{i}" for i in range(200)]
    out = []

    def work():
        out.append(tuple(ws.var(n) for n in names))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(ws) == 200
    assert all(row == out[0] for row in out)
    assert sorted(v.id for v in ws.variables) == list(range(200))


def test_sample_naive_count(sample):
    p, _ = sample
    assert len(p) == 6
    assert naive_op_count(p) == OpCount(5, 18)
    assert sorted(term_op_count(t) for t in p) == [0, 1, 2, 4, 5, 6]


def test_naive_count_small_cases():
    ws = Workspace()
    assert naive_op_count(Polynomial()) == OpCount(0, 0)
    assert naive_op_count(parse_polynomial("x", ws)) == OpCount(0, 0)
    assert naive_op_count(parse_polynomial("-x", ws)) == OpCount(0, 0)
    assert naive_op_count(parse_polynomial("a1*b0 - a0*b1", ws)) == OpCount(1, 2)
    # c3 x^3 + c2 x^2 + c1 x + c0: 3 + 2 + 1 + 1 under the per-term rule
    assert naive_op_count(parse_polynomial("2*x^3 + 3*x^2 + 4*x + 5", ws)) == OpCount(3, 7)


def test_parse_basic():
    ws = Workspace()
    p = parse_polynomial("3*x^2*y - x + 7 # trailing comment", ws)
    x, y = ws["x"], ws["y"]
    assert p == Polynomial.from_terms([(3, {x: 2, y: 1}), (-1, {x: 1}), (7, {})])


def test_parse_merges_like_terms_and_drops_zeros():
    ws = Workspace()
    p = parse_polynomial("x*y + y*x - 2*x*y + z", ws)
    assert p == Polynomial.variable(ws["z"])
    assert parse_polynomial("", ws).is_zero
    assert parse_polynomial("x - x", ws).is_zero


def test_parse_repeated_factor_and_multiline():
    ws = Workspace()
    p = parse_polynomial("x*x*2\n + 3*x^0", ws)
    x = ws["x"]
    assert p == Polynomial.from_terms([(2, {x: 2}), (3, {})])


@pytest.mark.parametrize(
    "text, offset",
    [("x +* y", 3), ("x y", 2), ("x^-2", 2), ("x^", 2), ("3 +", 3), ("x + $", 4), ("x # é\n + *", 10)],
)
def test_parse_errors_report_byte_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        parse_polynomial(text, Workspace())
    assert info.value.offset == offset


def test_format_zero_and_signs():
    ws = Workspace()
    assert format_polynomial(Polynomial()) == "0"
    assert format_polynomial(parse_polynomial("-x + 1 - 2*y^2", ws)) == "-2*y^2 - x + 1"


def test_occurrence_counts(sample):
    p, ws = sample
    x, y, z = ws.variables
    assert occurrence_counts(p) == {x: 5, y: 4, z: 4}
    w = ws.var("w")
    assert occurrence_counts(p, [w])[w] == 0


def test_evaluate_sample(sample):
    p, ws = sample
    one = {v: Fraction(1) for v in ws.variables}
    assert evaluate(p, one) == 7
    with pytest.raises(KeyError):
        evaluate(p, {ws["x"]: 1})


def test_degree_and_variables(sample):
    p, ws = sample
    assert p.degree() == 6
    assert p.degree(ws["y"]) == 2
    assert p.variables == ws.variables
    assert Polynomial().degree() == -1


@given(polynomials())
def test_format_parse_round_trip(pv):
    p, xs = pv
    ws = Workspace([v.name for v in xs])
    assert parse_polynomial(format_polynomial(p), ws) == p


@given(polynomials(max_vars=3, max_terms=6), polynomials(max_vars=3, max_terms=6), st.data())
def test_arithmetic_homomorphism(pv, qv, data):
    p, xs = pv
    q, ys = qv
    # both workspaces name variables x0, x1, ... so the longer list covers both
    pt = data.draw(points(max(xs, ys, key=len)))
    assert evaluate(p + q, pt) == evaluate(p, pt) + evaluate(q, pt)
    assert evaluate(p - q, pt) == evaluate(p, pt) - evaluate(q, pt)
    assert evaluate(p * q, pt) == evaluate(p, pt) * evaluate(q, pt)


@given(polynomials(max_vars=3, max_terms=5), polynomials(max_vars=3, max_terms=5))
def test_canonical_after_arithmetic(pv, qv):
    p, _ = pv
    q, _ = qv
    for r in (p + q, p - q, p * q, -p):
        monos = [m for m, _ in r.items()]
        assert all(c != 0 for _, c in r.items())
        assert len(set(monos)) == len(monos)
        for m in monos:
            assert list(m) == sorted(m)
            assert all(e > 0 for _, e in m)


def test_power_and_coercion():
    ws = Workspace("xy")
    x, y = (Polynomial.variable(v) for v in ws.variables)
    assert (x + y) ** 2 == x * x + 2 * x * y + y * y
    assert (x + 1) ** 0 == 1
    assert 3 - x == -(x - 3)
