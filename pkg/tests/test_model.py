import math
from fractions import Fraction

import pytest

from conftest import CONFIGS, FIELDS
from supermag.exactfield import QwScalar
from supermag.model import (
    IntegralSet,
    InvariantViolation,
    ParameterError,
    attempt_reduce_X5,
    binomial_series_invariants,
    build_first_integrals,
    build_integrals,
    build_oscillator_invariants,
    build_system,
    chebyshev,
    derive_params,
    reduce_order,
    rotated_frame,
    shifted_coordinates,
)
from supermag.phasepoly import (
    PhasePoly,
    evaluate,
    gauge_transform,
    momentum_grade,
    momentum_part,
    partial_derivative,
    poisson_bracket,
    substitute,
    substitute_linear,
)
from supermag.reference import reference_x4_m3n2

F = Fraction


def _integrals(w1, w2, m, n) -> IntegralSet:
    return build_integrals(derive_params(w1, w2, m, n))


# -- parameters --------------------------------------------------------------

def test_worked_example_params():
    p = derive_params(1, F(3, 2), 3, 2)
    assert p.kappa == F(3, 2) and p.rho == F(1, 2) and p.S == F(3, 2)
    assert p.tau == QwScalar.omega(p.rho) * 6
    assert p.tau**2 == 9 * 1 + 4 * F(9, 4)
    assert math.isclose(p.period, 2 * math.pi * math.sqrt(2), rel_tol=1e-15)


@pytest.mark.parametrize("m, n, S", [(1, 1, 1), (2, 1, 4)])
def test_special_cases_of_S(m, n, S):
    assert derive_params(1, 1, m, n).S == S


def test_parameter_guards():
    with pytest.raises(ParameterError, match=r"reduce m/n to lowest terms \(1/2\)"):
        derive_params(1, 1, 2, 4)
    for bad in [(0, 1, 1, 1), (1, -1, 1, 1), (1, 1, 0, 1), (1, 1, 1, -2)]:
        with pytest.raises(ParameterError):
            derive_params(*bad)


# -- system and first integrals ---------------------------------------------

def test_system_m1n1():
    p = derive_params(1, 1, 1, 1)
    sys_ = build_system(p)
    x, y, z, p1, p2, p3 = PhasePoly.variables(p.rho)
    assert sys_.W == (x - y) ** 2 * F(1, 2)
    assert evaluate(sys_.H, (1, 0, 0, 0, 0, 0)) == 1


def test_hamilton_equation_for_z():
    p = derive_params(1, F(3, 2), 3, 2)
    x, y, z, p1, p2, p3 = PhasePoly.variables(p.rho)
    zdot = partial_derivative(build_system(p).H, "p3")
    assert zdot == p3 - y * 1 - x * F(3, 2)


def test_first_integrals_examples():
    p = derive_params(1, F(3, 2), 3, 2)
    X = build_first_integrals(p)
    x, y, z, p1, p2, p3 = PhasePoly.variables(p.rho)
    assert X["X0"] == p3
    assert X["X3"] == p1 + p2 * F(3, 2) - 3 * z
    q = derive_params(1, 1, 1, 1)
    x, y, z, p1, p2, p3 = PhasePoly.variables(q.rho)
    assert build_first_integrals(q)["X3"] == p1 + p2 - 2 * z


# -- Chebyshev ---------------------------------------------------------------

def test_chebyshev_examples():
    assert chebyshev("T", 2) == [-1, 0, 2]
    assert chebyshev("U", 1) == [0, 2]
    assert chebyshev("T", 3) == [0, -3, 0, 4]


def _poly_sub(a, b):
    size = max(len(a), len(b))
    a = a + [0] * (size - len(a))
    b = b + [0] * (size - len(b))
    return [u - v for u, v in zip(a, b)]


@pytest.mark.parametrize("kind", ["T", "U"])
def test_chebyshev_recurrence(kind):
    for n in range(2, 11):
        rec = _poly_sub([0] + [2 * c for c in chebyshev(kind, n - 1)], chebyshev(kind, n - 2))
        assert _poly_sub(chebyshev(kind, n), rec) == [0] * len(rec)


def test_chebyshev_rejects_unknown_kind():
    with pytest.raises(ValueError):
        chebyshev("V", 2)


# -- oscillator invariants ---------------------------------------------------

def test_oscillator_m1n1_closed_forms():
    p = derive_params(1, 1, 1, 1)
    osc = build_oscillator_invariants(p)
    X, Y, _, P1, P2, _ = PhasePoly.variables(p.rho)
    assert osc.I3 == P1 * P2 + X * Y * p.rho
    assert osc.I1 == P1**2 + X**2 * p.rho


def test_oscillator_m1n1_sign_convention():
    # z1 = m w X + i P1, conj(z2) = n w Y - i P2, so Im(z1 conj z2) = w (Y P1 - X P2)
    p = derive_params(1, 1, 1, 1)
    X, Y, _, P1, P2, _ = PhasePoly.variables(p.rho)
    assert build_oscillator_invariants(p).I4 == (Y * P1 - X * P2).scale(p.omega)


@pytest.mark.parametrize("m, n", [(2, 1), (3, 2), (5, 2), (4, 3)])
def test_syzygy(m, n):
    osc = build_oscillator_invariants(derive_params(1, F(3, 2), m, n))
    assert (osc.I3**2 + osc.I4**2 - osc.I1**n * osc.I2**m).is_zero()


def test_oscillator_brackets_m3n2():
    osc = build_oscillator_invariants(derive_params(1, F(3, 2), 3, 2))
    assert poisson_bracket(osc.H2, osc.I3).is_zero()
    assert poisson_bracket(osc.H2, osc.I4).is_zero()


@pytest.mark.parametrize("m, n", [(m, n) for m in range(1, 7) for n in range(1, 7) if m + n <= 7 and math.gcd(m, n) == 1])
def test_binomial_series_matches_complex_power(m, n):
    p = derive_params(2, F(1, 3), m, n)
    osc = build_oscillator_invariants(p)
    s3, s4 = binomial_series_invariants(p)
    assert osc.I3 == s3 and osc.I4 == s4


# -- lifted integrals --------------------------------------------------------

@pytest.mark.parametrize("w1, w2", FIELDS)
def test_shifted_quadratic_invariants_match_cartesian_integrals(w1, w2):
    p = derive_params(w1, w2, 3, 2)
    X = build_first_integrals(p)
    osc = build_oscillator_invariants(p)
    Xt, Yt = shifted_coordinates(p, X["X0"])
    p3sq = X["X0"] ** 2
    d1 = substitute_linear(osc.I1, "x", Xt) - X["X1"]
    d2 = substitute_linear(osc.I2, "y", Yt) - X["X2"]
    c1 = d1.coeff((0, 0, 0, 0, 0, 2))
    c2 = d2.coeff((0, 0, 0, 0, 0, 2))
    assert d1 == p3sq.scale(c1) and d2 == p3sq.scale(c2)
    assert c1 + c2 == 1


def test_x4_raw_degree_m1n1():
    assert momentum_grade(_integrals(1, 1, 1, 1).X4_raw)[0] == 2


def test_x5_bracket_m3n2(worked_example):
    _, I = worked_example
    assert poisson_bracket(I.H, I.X5).is_zero()


@pytest.mark.parametrize("m, n", CONFIGS)
@pytest.mark.parametrize("w1, w2", FIELDS)
def test_every_integral_commutes_with_H(m, n, w1, w2):
    I = _integrals(w1, w2, m, n)
    for name, poly in I.items():
        assert poisson_bracket(I.H, poly).is_zero(), name
    assert (I.H - (I.X0**2 + I.X1 + I.X2) * F(1, 2)).is_zero()


# -- order reduction ---------------------------------------------------------

@pytest.mark.parametrize("m, n", CONFIGS)
def test_degrees(m, n):
    I = _integrals(1, F(3, 2), m, n)
    assert momentum_grade(I.X4_raw)[0] == m + n
    assert momentum_grade(I.X4_reduced)[0] == m + n - 1
    assert momentum_grade(I.X5)[0] == m + n


@pytest.mark.parametrize("m, n", [(3, 2), (2, 1), (1, 1)])
def test_x5_reduction_infeasible(m, n):
    I = _integrals(1, F(3, 2), m, n)
    basis = {k: I[k] for k in ("X0", "X1", "X2", "X3")}
    attempt = attempt_reduce_X5(I.X5, basis, I.params)
    assert not attempt.reducible and attempt.momentum_degree == m + n


def test_reduce_order_rejects_non_reducible_input(worked_example):
    params, I = worked_example
    basis = {k: I[k] for k in ("X0", "X1", "X2", "X3")}
    with pytest.raises(InvariantViolation):
        reduce_order(I.X5, basis, params)


def test_normalization_pins_leading_monomial(worked_example):
    _, I = worked_example
    red = I.reduction
    assert I.X4_reduced.coeff(red.normalization_monomial) == 1
    assert I.X4_reduced.scale(red.normalization) == red.unnormalized


@pytest.mark.parametrize("w1, w2", [(1, F(3, 2)), (2, F(1, 3)), (F(5, 7), 2)])
def test_reduced_x4_matches_hand_expansion(w1, w2):
    p = derive_params(w1, w2, 3, 2)
    I = build_integrals(p)
    leading, lower = reference_x4_m3n2(p)
    X = I.reduction.unnormalized
    assert momentum_part(X, 4) == leading
    assert X == leading + lower


def test_reference_only_for_m3n2():
    with pytest.raises(ParameterError):
        reference_x4_m3n2(derive_params(1, 1, 2, 1))


# -- gauge and frames --------------------------------------------------------

@pytest.mark.parametrize("c1, c2", [(F(1), F(0)), (F(-2, 3), F(5)), (F(7, 2), F(-1, 9))])
def test_gauge_covariance_of_integrals(c1, c2):
    p = derive_params(1, F(3, 2), 3, 2)
    I = build_integrals(p)
    x, y, z, *_ = PhasePoly.variables(p.rho)
    chi = x * y * c1 + z**2 * c2
    H = gauge_transform(I.H, chi)
    for name in ("X3", "X4_reduced", "X5"):
        assert poisson_bracket(H, gauge_transform(I[name], chi)).is_zero(), name


@pytest.mark.parametrize("m, n", CONFIGS)
def test_momentum_degree_same_in_covariant_momenta(m, n):
    p = derive_params(2, F(1, 3), m, n)
    I = build_integrals(p)
    x, y, z, p1, p2, p3 = PhasePoly.variables(p.rho)
    # canonical p3 = pA3 + W2 x + W1 y in this gauge
    to_cov = p3 + x * p.omega2_field + y * p.omega1_field
    for name in ("X4_reduced", "X5"):
        cov = substitute(I[name], "p3", to_cov)
        assert momentum_grade(cov)[0] == momentum_grade(I[name])[0]


@pytest.mark.parametrize("w1, w2, m, n", [(1, F(3, 2), 3, 2), (2, F(1, 3), 5, 2), (1, 1, 1, 1), (1, 1, 2, 1)])
def test_rotated_frame_frequencies(w1, w2, m, n):
    p = derive_params(w1, w2, m, n)
    hi, lo = rotated_frame(p).frequencies()
    expected = sorted([p.freq1.to_float(), p.freq2.to_float()], reverse=True)
    assert hi >= lo
    assert math.isclose(hi, expected[0], rel_tol=1e-12) and math.isclose(lo, expected[1], rel_tol=1e-12)


def test_rotated_frame_worked_example():
    frame = rotated_frame(derive_params(1, F(3, 2), 3, 2))
    assert math.isclose(frame.omega_hat**2, 13 / 4, rel_tol=1e-14)


def test_rotated_frame_kappa_one_has_no_transverse_field():
    assert abs(math.sin(rotated_frame(derive_params(1, 1, 1, 1)).beta)) < 1e-15


# -- serialization -----------------------------------------------------------

def test_integral_set_json_round_trip(worked_example):
    _, I = worked_example
    doc = I.to_json()
    for name, poly in I.items():
        assert PhasePoly.from_json(doc["integrals"][name]) == poly
    assert doc["momentum_degrees"]["X4_reduced"] == 4
    assert doc["params"]["S"] == "3/2"
