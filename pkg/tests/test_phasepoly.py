import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import RHO, polys, small_fractions
from supermag.exactfield import QwScalar
from supermag.phasepoly import (
    DegreeBoundError,
    PhasePoly,
    evaluate,
    evaluate_many,
    gauge_transform,
    momentum_grade,
    partial_derivative,
    poisson_bracket,
    poly_arith,
    substitute,
    substitute_linear,
)

x, y, z, p1, p2, p3 = PhasePoly.variables(RHO)
W = QwScalar.omega(RHO)
points = st.tuples(*[small_fractions] * 6)


def test_products():
    assert x * p1 == PhasePoly.from_terms({(1, 0, 0, 1, 0, 0): 1}, RHO)
    assert (x - y) * (x + y) == x**2 - y**2
    assert (x + p3.scale(W)) ** 2 == x**2 + (x * p3).scale(2 * W) + p3**2 * Fraction(1, 2)


def test_partial_derivatives():
    f = x**2 * p1
    assert partial_derivative(f, "x") == 2 * x * p1
    assert partial_derivative(f, "p2").is_zero()
    assert partial_derivative((x - y) ** 2, "y") == -2 * x + 2 * y


def test_canonical_brackets():
    assert poisson_bracket(x, p1) == PhasePoly.constant(1, RHO)
    assert poisson_bracket(p1, x) == PhasePoly.constant(-1, RHO)
    assert poisson_bracket(x**2, p1) == 2 * x
    W1, W2 = Fraction(1), Fraction(3, 2)
    assert poisson_bracket(p2, p3 - x * W2 - y * W1) == PhasePoly.constant(W1, RHO)


def test_substitute_linear_examples():
    c = Fraction(5, 3)
    assert substitute_linear(x**2, "x", x - c) == x**2 - 2 * c * x + c**2
    assert substitute_linear(p3, "p3", p3) == p3
    with pytest.raises(ValueError):
        substitute_linear(x, "x", y**2)


def test_shift_coefficient_worked_example():
    # W1 = 1, W2 = 3/2, n = 2, m = 3: x -> x - n^2 W2 p3 / (n^2 W2^2 + m^2 W1^2)
    W1, W2, m, n = Fraction(1), Fraction(3, 2), 3, 2
    shifted = substitute_linear(x, "x", x - p3 * (n**2 * W2 / (n**2 * W2**2 + m**2 * W1**2)))
    assert shifted.coeff((0, 0, 0, 0, 0, 1)) == Fraction(-1, 3)


def test_evaluate_examples():
    assert evaluate(x**2 + p1, (1, 0, 0, 2, 0, 0)) == 3
    assert evaluate(PhasePoly.zero(RHO), (1, 2, 3, 4, 5, 6)) == 0
    f = x * p3.scale(W) + y
    assert evaluate(f, (2, 1, 0, 0, 0, 3)) == QwScalar(1, 6, RHO)
    assert abs(evaluate(f, (2.0, 1.0, 0.0, 0.0, 0.0, 3.0)) - (1 + 6 * 0.5**0.5)) < 1e-15


def test_momentum_grade_examples():
    deg, lead = momentum_grade(p1**2 * p3 - x**5)
    assert deg == 3 and lead == p1**2 * p3
    deg, lead = momentum_grade(x - y)
    assert deg == 0 and lead == x - y
    with pytest.raises(ValueError):
        momentum_grade(PhasePoly.zero(RHO))


def test_gauge_transform_examples():
    f = x * p1 + p3**2
    assert gauge_transform(f, PhasePoly.zero(RHO)) == f
    c = Fraction(7, 2)
    assert gauge_transform(p3, z * c) == p3 - c
    with pytest.raises(ValueError):
        gauge_transform(p3, p1 * x)


def test_term_order_is_graded_lex():
    f = x + y + p3 + x**2 + x * p3 + 1
    exps = [t["exp"] for t in f.to_json()["terms"]]
    assert exps[0] == [1, 0, 0, 0, 0, 1]
    assert exps[1] == [2, 0, 0, 0, 0, 0]
    assert exps[-1] == [0, 0, 0, 0, 0, 0]
    assert exps.index([0, 0, 0, 0, 0, 1]) < exps.index([0, 1, 0, 0, 0, 0]) < exps.index([1, 0, 0, 0, 0, 0])


def test_degree_bound():
    with pytest.raises(DegreeBoundError):
        x**65
    assert (x**64).degree() == 64


def test_field_mismatch_between_polys():
    with pytest.raises(ValueError):
        x + PhasePoly.var("y", Fraction(1, 3))


def test_evaluate_many_matches_evaluate():
    f = (x + p1.scale(W)) ** 3 - y * z * p2 + 2
    pts = np.array([[0.5, -1, 2, 0.25, 3, -2], [1, 1, 1, 1, 1, 1]], dtype=float)
    vals = evaluate_many(f, pts)
    for row, v in zip(pts, vals):
        assert abs(evaluate(f, tuple(row)) - v) < 1e-12


@given(polys())
def test_json_round_trip(f):
    doc = f.to_json()
    assert PhasePoly.from_json(json.loads(json.dumps(doc))) == f
    assert PhasePoly.from_json(doc).to_json() == doc


@settings(max_examples=200, deadline=None)
@given(polys(max_exp=3), polys(max_exp=3))
def test_bracket_antisymmetry(f, g):
    assert (poisson_bracket(f, g) + poisson_bracket(g, f)).is_zero()


@settings(max_examples=200, deadline=None)
@given(polys(max_terms=4, max_exp=1), polys(max_terms=4, max_exp=1), polys(max_terms=4, max_exp=1))
def test_jacobi_identity(f, g, h):
    total = (
        poisson_bracket(f, poisson_bracket(g, h))
        + poisson_bracket(g, poisson_bracket(h, f))
        + poisson_bracket(h, poisson_bracket(f, g))
    )
    assert total.is_zero()


@settings(max_examples=200, deadline=None)
@given(polys(), polys(), polys())
def test_leibniz_rule(f, g, h):
    assert poisson_bracket(f * g, h) == f * poisson_bracket(g, h) + poisson_bracket(f, h) * g


@settings(deadline=None)
@given(polys(), small_fractions, small_fractions, st.sampled_from(["x", "y", "z", "p1", "p2", "p3"]))
def test_substitution_round_trip(f, a, c, var):
    a = a or Fraction(1)
    v = PhasePoly.var(var, RHO)
    forward = substitute_linear(f, var, v * a + c)
    assert substitute_linear(forward, var, (v - c) / a) == f


@settings(deadline=None)
@given(polys(), polys(), points)
def test_evaluation_is_a_homomorphism(f, g, pt):
    assert evaluate(poly_arith(f, g, "mul"), pt) == evaluate(f, pt) * evaluate(g, pt)
    assert evaluate(poly_arith(f, g, "add"), pt) == evaluate(f, pt) + evaluate(g, pt)


rational_polys = st.dictionaries(st.tuples(*[st.integers(0, 2)] * 6), small_fractions, max_size=3).map(
    lambda terms: PhasePoly.from_terms(terms, RHO)
)


@settings(deadline=None)
@given(polys(max_terms=3), rational_polys, points)
def test_general_substitution_commutes_with_evaluation(f, r, pt):
    g = substitute(f, "z", r)
    inner = evaluate(r, pt)
    assert evaluate(g, pt) == evaluate(f, pt[:2] + (inner.a,) + pt[3:])


@settings(max_examples=20, deadline=None)
@given(polys(max_terms=4), polys(max_terms=4), small_fractions, small_fractions, small_fractions)
def test_gauge_preserves_brackets(f, g, c1, c2, c3):
    chi = (x * y) * c1 + z**2 * c2 + (x * z) * c3
    lhs = poisson_bracket(gauge_transform(f, chi), gauge_transform(g, chi))
    assert lhs == gauge_transform(poisson_bracket(f, g), chi)
