import ctypes
import json
import shutil
import subprocess
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mctshorner import Workspace, parse_polynomial, structured_random
from mctshorner.cse import InstructionSeq, cse, instruction_count, replay
from mctshorner.emit import STATS_SCHEMA, StatsReport, TacParseError, emit_c_like, emit_stats, emit_tac, parse_tac, sweep_csv
from mctshorner.horner import Const, horner_transform, tree_op_count

from conftest import points, polynomials


def sample_code(sample):
    p, ws = sample
    return cse(horner_transform(p, ws.variables))


def test_tac_sample(sample):
    text = emit_tac(sample_code(sample))
    lines = text.splitlines()
    assert len(lines) == 12
    assert lines[-1] == "result = t10"
    assert lines.count("t2 = -3 + t0") == 1
    assert "t0 = 5 * z" in lines


def test_tac_trivial():
    assert emit_tac(InstructionSeq((), Const(7))) == "result = 7\n"
    ws = Workspace("ab")
    s = cse(horner_transform(parse_polynomial("a + b", ws), ws.variables))
    assert emit_tac(s) == "t0 = a + b\nresult = t0\n"


@given(polynomials(max_vars=4, max_terms=10), st.data())
def test_tac_round_trip(pv, data):
    p, xs = pv
    s = cse(horner_transform(p, data.draw(st.permutations(xs))))
    ws = Workspace([v.name for v in xs])
    back = parse_tac(emit_tac(s), ws)
    assert back == s
    for _ in range(3):
        pt = data.draw(points(xs))
        assert replay(back, pt) == replay(s, pt)


@pytest.mark.parametrize(
    "text",
    ["t0 = a + b\n", "t1 = a + b\nresult = t1\n", "t0 = a + t3\nresult = t0\n", "t0 = a - b\nresult = t0\n",
     "result = a\nt0 = a + b\n"],
)
def test_tac_parse_errors(text):
    with pytest.raises(TacParseError):
        parse_tac(text, Workspace())


def test_names_that_look_like_temps_are_rejected():
    ws = Workspace()
    s = cse(horner_transform(parse_polynomial("t1*x + x", ws), ws.variables))
    with pytest.raises(ValueError):
        emit_tac(s)


def test_c_like_shape(sample):
    p, ws = sample
    s = sample_code(sample)
    src = emit_c_like(s, "eval_a", ws.variables)
    assert "double eval_a(double x, double y, double z)" in src
    assert "double precision" in src
    statements = [ln for ln in src.splitlines() if ln.strip().endswith(";")]
    assert len(statements) == len(s) + 1
    assert sum(1 for ln in statements if "const double" in ln) == instruction_count(s).total


def test_c_like_constant_and_single_mul():
    src = emit_c_like(InstructionSeq((), Const(7)), "seven")
    assert "return 7.0;" in src and "double seven(void)" in src
    ws = Workspace("ab")
    s = cse(horner_transform(parse_polynomial("a*b", ws), ws.variables))
    body = [ln.strip() for ln in emit_c_like(s).splitlines() if ln.strip().endswith(";")]
    assert body == ["const double t0 = a * b;", "return t0;"]
    with pytest.raises(ValueError):
        emit_c_like(s, "not valid")


@pytest.mark.skipif(shutil.which("cc") is None, reason="no C compiler")
def test_c_like_compiles_and_matches(tmp_path):
    ws = Workspace()
    p = structured_random(6, 40, 5, seed=3, workspace=ws)
    s = cse(horner_transform(p, p.variables))
    src = tmp_path / "poly.c"
    lib = tmp_path / "poly.so"
    src.write_text(emit_c_like(s, "poly", p.variables))
    subprocess.run(["cc", "-O2", "-shared", "-fPIC", "-Wall", "-Werror", str(src), "-o", str(lib)], check=True)
    fn = ctypes.CDLL(str(lib)).poly
    fn.restype = ctypes.c_double
    fn.argtypes = [ctypes.c_double] * len(p.variables)
    rng = np.random.default_rng(0)
    for _ in range(50):
        vals = [Fraction(int(k), 64) for k in rng.integers(32, 128, size=len(p.variables))]
        exact = replay(s, dict(zip(p.variables, vals)))
        got = fn(*[float(v) for v in vals])
        assert abs(got - float(exact)) <= 1e-12 * max(1.0, abs(float(exact)))


def test_stats_sample(sample):
    p, ws = sample
    from mctshorner.expr import naive_op_count

    d = horner_transform(p, ws.variables)
    s = cse(d)
    rep = StatsReport(naive_op_count(p), tree_op_count(d), instruction_count(s), ("x", "y", "z"), {"seed": 0})
    doc = json.loads(emit_stats(rep))
    assert doc["schema"] == STATS_SCHEMA
    assert (doc["naive_total"], doc["horner_total"], doc["cse_total"]) == (23, 13, 11)
    assert doc["cse"] == {"adds": 4, "muls": 7, "total": 11}
    assert doc["trace"] == []
    assert "wall_time" not in doc
    assert emit_stats(rep) == emit_stats(rep)
    rep.wall_time = 0.5
    assert json.loads(emit_stats(rep))["wall_time"] == 0.5


def test_sweep_csv():
    text = sweep_csv([(0.1, 300, 0, 4051), (1.0, 3000, 2, 3990)])
    assert text == "cp,N,seed,best_total\n0.1,300,0,4051\n1.0,3000,2,3990\n"
