from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from mctshorner import OpCount, Workspace
from mctshorner.cse import ADD, MUL, NEG, InstructionSeq, cse, instruction_count, replay, to_dag
from mctshorner.horner import Const, Var, evaluate_dag, horner_transform, make_add, make_mul, tree_op_count

from conftest import points, polynomials


def test_sample_cse_shares_minus_three_plus_five_z(sample):
    p, ws = sample
    s = cse(horner_transform(p, ws.variables))
    assert instruction_count(s) == OpCount(4, 7)
    assert len(s) == 11
    z = Var(ws["z"])
    # -3 + 5z is built exactly once and then reused
    five_z = [i for i in s if i.op == MUL and {i.lhs, i.rhs} == {Const(5), z}]
    assert len(five_z) == 1
    t = five_z[0].dest
    uses = [i for i in s if i.op == ADD and Const(-3) in (i.lhs, i.rhs) and t in (getattr(i.lhs, "id", None), getattr(i.rhs, "id", None))]
    assert len(uses) == 1
    one = {v: Fraction(1) for v in ws.variables}
    assert replay(s, one) == 7


def test_square_of_sum():
    ws = Workspace("ab")
    a, b = (Var(v) for v in ws.variables)
    s = make_add([a, b])
    seq = cse(make_mul([s, s]))
    assert [str(i) for i in seq] == ["t0 = a + b", "t1 = t0 * t0"]
    assert instruction_count(seq) == OpCount(1, 1)


def test_constant_input():
    seq = cse(Const(7))
    assert len(seq) == 0
    assert seq.result == Const(7)
    assert instruction_count(seq) == OpCount(0, 0)
    assert replay(seq, {}) == 7


def test_commutative_operands_shared():
    ws = Workspace("abc")
    a, b, c = (Var(v) for v in ws.variables)
    # a*b appears as a prefix of both products
    d = make_add([make_mul([a, b, c]), make_mul([a, b])])
    seq = cse(d)
    assert instruction_count(seq) == OpCount(1, 2)


def test_negation_is_free_and_explicit():
    ws = Workspace("ab")
    a, b = (Var(v) for v in ws.variables)
    seq = cse(make_mul([Const(-1), a, b]))
    assert [i.op for i in seq] == [MUL, NEG]
    assert instruction_count(seq) == OpCount(0, 1)
    assert replay(seq, {ws["a"]: 2, ws["b"]: 3}) == -6


def test_temps_dense_and_topological(sample):
    p, ws = sample
    seq = cse(horner_transform(p, ws.variables))
    for k, ins in enumerate(seq):
        assert ins.dest == k
        for o in (ins.lhs, ins.rhs):
            if hasattr(o, "id") and not isinstance(o, (Const, Var)):
                assert o.id < k


def test_str_has_result_line(sample):
    p, ws = sample
    text = str(cse(horner_transform(p, ws.variables)))
    assert text.splitlines()[-1] == "result = t10"


def _dags(xs):
    leaves = st.one_of(st.sampled_from([Var(v) for v in xs]), st.integers(-4, 4).map(Const))
    return st.recursive(
        leaves,
        lambda kids: st.one_of(
            st.lists(kids, min_size=2, max_size=4).map(make_add),
            st.lists(kids, min_size=2, max_size=4).map(make_mul),
        ),
        max_leaves=25,
    )


@st.composite
def dag_and_vars(draw):
    ws = Workspace([f"x{i}" for i in range(draw(st.integers(1, 4)))])
    return draw(_dags(ws.variables)), ws.variables


@given(dag_and_vars(), st.data())
def test_replay_matches_dag(dv, data):
    d, xs = dv
    seq = cse(d)
    for _ in range(3):
        pt = data.draw(points(xs))
        assert replay(seq, pt) == evaluate_dag(d, pt)


@given(dag_and_vars())
def test_sharing_never_costs_more(dv):
    d, _ = dv
    assert instruction_count(cse(d)).total <= tree_op_count(d).total


@given(dag_and_vars())
def test_no_duplicate_instructions(dv):
    d, _ = dv
    seen = set()
    for ins in cse(d):
        key = (ins.op, ins.lhs, ins.rhs)
        assert key not in seen
        seen.add(key)


@given(polynomials(max_vars=4, max_terms=12), st.data())
def test_cost_idempotent_through_reconstruction(pv, data):
    p, xs = pv
    seq = cse(horner_transform(p, data.draw(st.permutations(xs))))
    again = cse(to_dag(seq))
    assert instruction_count(again) == instruction_count(seq)


@given(dag_and_vars())
def test_deterministic(dv):
    d, _ = dv
    a, b = cse(d), cse(d)
    assert a == b and isinstance(a, InstructionSeq)
