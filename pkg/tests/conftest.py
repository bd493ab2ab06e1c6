from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from mctshorner import Polynomial, Workspace, parse_polynomial

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SAMPLE_TEXT = "y - 3*x + 5*x*z + 2*x^2*y*z - 3*x^2*y^2*z + 5*x^2*y^2*z^2"


@pytest.fixture
def sample():
    ws = Workspace("xyz")
    return parse_polynomial(SAMPLE_TEXT, ws), ws


def polynomials(max_vars=5, max_terms=12, max_exp=4, max_coeff=30, min_terms=0):
    """Strategy yielding (Polynomial, tuple of its workspace variables)."""

    @st.composite
    def build(draw):
        nv = draw(st.integers(1, max_vars))
        ws = Workspace([f"x{i}" for i in range(nv)])
        xs = ws.variables
        nterms = draw(st.integers(min_terms, max_terms))
        terms = []
        for _ in range(nterms):
            c = draw(st.integers(-max_coeff, max_coeff).filter(bool))
            exps = draw(st.lists(st.integers(0, max_exp), min_size=nv, max_size=nv))
            terms.append((c, dict(zip(xs, exps))))
        return Polynomial.from_terms(terms), xs

    return build()


def rationals():
    return st.fractions(min_value=-5, max_value=5, max_denominator=7)


def points(xs):
    return st.fixed_dictionaries({v: rationals() for v in xs})


def random_point(rng, xs):
    return {v: Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 8))) for v in xs}


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
