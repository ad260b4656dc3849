from fractions import Fraction

import pytest
from hypothesis import strategies as st

from supermag.exactfield import QwScalar
from supermag.phasepoly import PhasePoly

RHO = Fraction(1, 2)

CONFIGS = [(1, 1), (2, 1), (3, 2), (4, 3), (5, 2)]
FIELDS = [(Fraction(1), Fraction(1)), (Fraction(1), Fraction(3, 2)), (Fraction(2), Fraction(1, 3))]

small_fractions = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))


@st.composite
def qw_scalars(draw, rho=RHO):
    return QwScalar(draw(small_fractions), draw(small_fractions), rho)


@st.composite
def polys(draw, max_terms=5, max_exp=2, rho=RHO):
    exps = st.tuples(*[st.integers(0, max_exp)] * 6)
    terms = draw(st.dictionaries(exps, qw_scalars(rho), max_size=max_terms))
    return PhasePoly.from_terms(terms, rho)


@pytest.fixture(scope="session")
def worked_example():
    from supermag.model import build_integrals, derive_params

    params = derive_params(1, Fraction(3, 2), 3, 2)
    return params, build_integrals(params)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
