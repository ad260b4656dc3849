import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import qw_scalars, small_fractions
from supermag.exactfield import (
    FieldMismatchError,
    QwScalar,
    bareiss_rank,
    format_rational,
    normalize_rho,
    parse_rational,
    qw_arith,
    solve_linear,
    to_float,
)

H = Fraction(1, 2)


def test_products_and_inverse():
    w = QwScalar.omega(H)
    assert QwScalar(1, 0, H) * w == w
    assert w * w == QwScalar(H, 0, H)
    inv = QwScalar(1, 1, H).inverse()
    assert inv == QwScalar(2, -2, H)
    assert inv * QwScalar(1, 1, H) == 1


def test_qw_arith_dispatch():
    a, b = QwScalar(1, 2, H), QwScalar(3, -1, H)
    assert qw_arith(a, b, "add") == a + b
    assert qw_arith(a, b, "sub") == a - b
    assert qw_arith(a, b, "mul") == a * b
    assert qw_arith(a, b, "div") * b == a
    with pytest.raises(ZeroDivisionError):
        qw_arith(a, QwScalar(0, 0, H), "div")


def test_field_mismatch():
    with pytest.raises(FieldMismatchError):
        QwScalar(1, 1, H) + QwScalar(1, 1, Fraction(1, 3))


@pytest.mark.parametrize("rho, root", [(Fraction(9, 4), Fraction(3, 2)), (H, None), (Fraction(1), Fraction(1))])
def test_normalize_rho(rho, root):
    assert normalize_rho(rho) == root


def test_square_rho_folds():
    s = QwScalar(0, 1, Fraction(9, 4))
    assert s.b == 0 and s.a == Fraction(3, 2)


def test_to_float_examples():
    assert to_float(QwScalar(1, 0, H)) == 1.0
    assert to_float(QwScalar(0, 1, H)) == 0.7071067811865476
    # correctly rounded; naive 2 - 2*sqrt(0.5) lands one ulp lower
    value = to_float(QwScalar(2, -2, H))
    assert value == 0.585786437626905
    assert abs(value - 0.5857864376269049) <= math.ulp(value)


def test_rational_parsing():
    assert parse_rational("3/2") == Fraction(3, 2)
    assert parse_rational("-4") == -4
    assert format_rational(Fraction(3)) == "3/1"
    for bad in ("0.5", "1e3", "a/b", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")


def test_json_round_trip():
    s = QwScalar(Fraction(-7, 3), Fraction(5, 11), H)
    assert QwScalar.from_json(s.to_json(), H) == s
    assert s.to_json() == {"a": "-7/3", "b": "5/11"}


@given(qw_scalars(), qw_scalars(), qw_scalars())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a * (b + c) == a * b + a * c
    if a:
        assert a * a.inverse() == 1


@settings(max_examples=1000)
@given(qw_scalars(), qw_scalars())
def test_to_float_monotone(s, t):
    if (t - s).sign() > 0:
        assert to_float(s) <= to_float(t)


def test_exact_sign_near_cancellation():
    # 99/70 is a close convergent of sqrt(2): 99/70 - 2w with w^2 = 1/2
    s = QwScalar(Fraction(99, 70), -2, H)
    assert s.sign() == 1
    assert QwScalar(Fraction(140, 99), -2, H).sign() == -1


def test_bareiss_rank_and_solve():
    m = [[Fraction(v) for v in row] for row in ([1, 2, 3], [2, 4, 6], [1, 0, 1])]
    assert bareiss_rank(m) == 2
    w = QwScalar.omega(H)
    a = [[QwScalar(1, 0, H), w], [w, QwScalar(1, 0, H)]]
    x = solve_linear(a, [QwScalar(1, 0, H), QwScalar(0, 0, H)])
    assert a[0][0] * x[0] + a[0][1] * x[1] == 1
    assert a[1][0] * x[0] + a[1][1] * x[1] == 0
    assert solve_linear([[Fraction(1)], [Fraction(1)]], [Fraction(1), Fraction(2)]) is None


@given(st.lists(st.lists(small_fractions, min_size=4, max_size=4), min_size=1, max_size=4))
def test_rank_bounded_and_row_invariant(rows):
    r = bareiss_rank(rows)
    assert r <= min(len(rows), 4)
    assert bareiss_rank(rows + [[2 * v for v in rows[0]]]) == r
