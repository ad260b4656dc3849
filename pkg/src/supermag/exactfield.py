"""Exact arithmetic in Q(w) with w**2 = rho, a fixed positive rational.

Elements are ``a + b*w`` with rational ``a``, ``b``. When ``rho`` is the square
of a rational ``r`` the extension is trivial and ``w`` is folded into the
rational part at construction, so ``b`` is always zero.

The module also hosts the small amount of exact linear algebra the rest of the
package needs (rank and linear solves over the field).
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction, str]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


class FieldMismatchError(ValueError):
    """Two operands live in different quadratic extensions."""


def parse_rational(value: RationalLike) -> Fraction:
    """Parse ``"num/den"`` or an integer string. Decimal strings are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise TypeError(f"cannot interpret {value!r} as an exact rational")
    match = _RATIONAL_RE.match(value)
    if match is None:
        raise ValueError(f"not an exact rational: {value!r} (use 'num/den' or an integer)")
    num, den = match.groups()
    if den is not None and int(den) == 0:
        raise ZeroDivisionError(f"zero denominator in {value!r}")
    return Fraction(int(num), int(den) if den is not None else 1)


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


@lru_cache(maxsize=256)
def normalize_rho(rho: Fraction) -> Fraction | None:
    """Return ``r`` if ``rho == r**2`` for a rational ``r >= 0``, else ``None``.

    Raises ValueError for ``rho <= 0``.
    """
    rho = Fraction(rho)
    if rho <= 0:
        raise ValueError(f"field constant must be positive, got {rho}")
    num_root = math.isqrt(rho.numerator)
    den_root = math.isqrt(rho.denominator)
    if num_root * num_root == rho.numerator and den_root * den_root == rho.denominator:
        return Fraction(num_root, den_root)
    return None


class QwScalar:
    """Immutable element ``a + b*w`` of Q(w), ``w = sqrt(rho)``."""

    __slots__ = ("a", "b", "rho")

    def __init__(self, a: RationalLike = 0, b: RationalLike = 0, rho: RationalLike = 1):
        a = parse_rational(a)
        b = parse_rational(b)
        rho = parse_rational(rho)
        if b:
            root = normalize_rho(rho)
            if root is not None:
                a, b = a + b * root, Fraction(0)
        elif rho <= 0:
            raise ValueError(f"field constant must be positive, got {rho}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "rho", rho)

    def __setattr__(self, name, value):
        raise AttributeError("QwScalar is immutable")

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, rho: Fraction) -> QwScalar:
        # caller guarantees the folding invariant
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        object.__setattr__(obj, "rho", rho)
        return obj

    @classmethod
    def omega(cls, rho: RationalLike) -> QwScalar:
        return cls(0, 1, rho)

    def _coerce(self, other) -> QwScalar:
        if isinstance(other, QwScalar):
            if other.rho != self.rho:
                raise FieldMismatchError(
                    f"cannot combine elements of Q(sqrt({self.rho})) and Q(sqrt({other.rho}))"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QwScalar._raw(Fraction(other), Fraction(0), self.rho)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QwScalar._raw(self.a + other.a, self.b + other.b, self.rho)

    __radd__ = __add__

    def __neg__(self):
        return QwScalar._raw(-self.a, -self.b, self.rho)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QwScalar._raw(self.a - other.a, self.b - other.b, self.rho)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return QwScalar._raw(a1 * a2 + b1 * b2 * self.rho, a1 * b2 + b1 * a2, self.rho)

    __rmul__ = __mul__

    def conjugate(self) -> QwScalar:
        return QwScalar._raw(self.a, -self.b, self.rho)

    def norm(self) -> Fraction:
        """Field norm ``a**2 - b**2 * rho``; nonzero for nonzero elements."""
        return self.a * self.a - self.b * self.b * self.rho

    def inverse(self) -> QwScalar:
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(w)")
        n = self.norm()
        return QwScalar._raw(self.a / n, -self.b / n, self.rho)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, k: int) -> QwScalar:
        if k < 0:
            return self.inverse() ** (-k)
        result = QwScalar._raw(Fraction(1), Fraction(0), self.rho)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison -------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __eq__(self, other) -> bool:
        if isinstance(other, QwScalar):
            return self.a == other.a and self.b == other.b and self.rho == other.rho
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.rho))

    def sign(self) -> int:
        """Exact sign of ``a + b*sqrt(rho)``."""
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0 or sa == sb:
            return sa or sb
        if sa == 0:
            return sb
        # opposite signs: compare a**2 with b**2 rho
        diff = self.a * self.a - self.b * self.b * self.rho
        return sa if diff > 0 else (sb if diff < 0 else 0)

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    # -- conversion -------------------------------------------------------
    def to_float(self, precision_hint: int = 128) -> float:
        """Nearest double to ``a + b*sqrt(rho)``.

        ``sqrt(rho)`` is approximated with ``precision_hint`` extra bits via an
        integer square root, so cancellation in ``a - b*sqrt(rho)`` is harmless.
        """
        if not self.b:
            return float(self.a)
        bits = max(precision_hint, 64)
        rho = self.rho
        # floor(sqrt(rho) * den * 2**bits) with rho = num/den
        scaled = math.isqrt(rho.numerator * rho.denominator << (2 * bits))
        approx = Fraction(scaled, rho.denominator << bits)
        return float(self.a + self.b * approx)

    def __float__(self) -> float:
        return self.to_float()

    def to_json(self) -> dict:
        return {"a": format_rational(self.a), "b": format_rational(self.b)}

    @classmethod
    def from_json(cls, doc: dict, rho: RationalLike) -> QwScalar:
        return cls(doc["a"], doc["b"], rho)

    def __repr__(self) -> str:
        return f"QwScalar({self.a}, {self.b}, rho={self.rho})"

    def __str__(self) -> str:
        if not self.b:
            return str(self.a)
        if not self.a:
            return f"{self.b}*w"
        sign = "+" if self.b > 0 else "-"
        return f"{self.a} {sign} {abs(self.b)}*w"


def qw_arith(lhs: QwScalar, rhs: QwScalar, op: str) -> QwScalar:
    """Dispatch ``op`` in {'add', 'sub', 'mul', 'div'}."""
    if lhs.rho != rhs.rho:
        raise FieldMismatchError(f"rho mismatch: {lhs.rho} vs {rhs.rho}")
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise ValueError(f"unknown operation {op!r}")


def to_float(s: QwScalar, precision_hint: int = 128) -> float:
    return s.to_float(precision_hint)


# ---------------------------------------------------------------------------
# exact linear algebra over Q(w)
# ---------------------------------------------------------------------------

def _as_rows(matrix: Sequence[Sequence[QwScalar]]) -> list[list[QwScalar]]:
    return [list(row) for row in matrix]


def bareiss_rank(matrix: Sequence[Sequence[QwScalar]]) -> int:
    """Rank by fraction-free (Bareiss) elimination with row pivoting.

    Every division in the Bareiss update is exact, so entries stay minors of
    the input and never accumulate spurious denominators.
    """
    rows = _as_rows(matrix)
    if not rows or not rows[0]:
        return 0
    n_rows, n_cols = len(rows), len(rows[0])
    prev = None
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, n_rows):
            f = rows[r][col]
            row_r, row_p = rows[r], rows[rank]
            for c in range(col + 1, n_cols):
                val = p * row_r[c] - f * row_p[c]
                row_r[c] = val / prev if prev is not None else val
            row_r[col] = p * 0
        prev = p
        rank += 1
    return rank


def solve_linear(
    matrix: Sequence[Sequence[QwScalar]], rhs: Sequence[QwScalar]
) -> list[QwScalar] | None:
    """Solve ``matrix @ x = rhs`` exactly; ``None`` if the system is inconsistent.

    Free variables are set to zero. Gauss-Jordan with first-nonzero pivoting.
    """
    rows = _as_rows(matrix)
    if len(rows) != len(rhs):
        raise ValueError("row count mismatch between matrix and right-hand side")
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    aug = [row + [b] for row, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for col in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if aug[i][col]), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][col]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(n_rows):
            if i != r and aug[i][col]:
                f = aug[i][col]
                aug[i] = [vi - f * vr for vi, vr in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
        if r == n_rows:
            break
    for i in range(r, n_rows):
        if aug[i][n_cols]:
            return None
    zero = rhs[0] * 0 if rhs else None
    solution = [zero] * n_cols
    for i, col in enumerate(pivots):
        solution[col] = aug[i][n_cols]
    return solution


def matrix_from_rationals(values: Iterable[Iterable[RationalLike]], rho: RationalLike) -> list[list[QwScalar]]:
    rho = parse_rational(rho)
    return [[QwScalar(v, 0, rho) for v in row] for row in values]
