"""Sparse polynomials over Q(w) in the phase-space variables (x, y, z, p1, p2, p3).

A polynomial is stored as ``(A + w*B) / den`` where ``A`` and ``B`` map packed
monomials to Python integers and ``den`` is a positive integer. The canonical
form has no zero entries and ``gcd(den, all coefficients) == 1``, so equal
polynomials have equal representations.

Packed monomials keep one exponent per byte with ``x`` in the lowest byte and
``p3`` in the highest, which makes the integer order of the keys agree with
lexicographic order on ``(p3, p2, p1, z, y, x)``. Canonical term order is
graded lexicographic: total degree first, then that key.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

from . import kernels
from .exactfield import (
    FieldMismatchError,
    QwScalar,
    format_rational,
    normalize_rho,
    parse_rational,
)

VARIABLES = ("x", "y", "z", "p1", "p2", "p3")
COORDINATES = VARIABLES[:3]
MOMENTA = VARIABLES[3:]
DEFAULT_DEGREE_BOUND = 64


Scalar = Union[int, Fraction, QwScalar]


class DegreeBoundError(OverflowError):
    """A product would exceed the configured total-degree bound."""

    def __init__(self, degree: int, bound: int):
        super().__init__(f"total degree {degree} exceeds bound {bound}")
        self.degree = degree
        self.bound = bound


class Monomial(NamedTuple):
    x: int = 0
    y: int = 0
    z: int = 0
    p1: int = 0
    p2: int = 0
    p3: int = 0

    @property
    def degree(self) -> int:
        return sum(self)

    @property
    def momentum_degree(self) -> int:
        return self.p1 + self.p2 + self.p3

    def pack(self) -> int:
        return pack(self)


def pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if not 0 <= e <= 0xFF:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (8 * i)
    return key


def unpack(key: int) -> Monomial:
    return Monomial(*((key >> (8 * i)) & 0xFF for i in range(6)))


def key_degree(key: int) -> int:
    total = 0
    while key:
        total += key & 0xFF
        key >>= 8
    return total


def key_momentum_degree(key: int) -> int:
    return key_degree(key >> 24)


def _order_key(key: int) -> tuple[int, int]:
    return key_degree(key), key


def _var_index(var: str | int) -> int:
    if isinstance(var, int):
        if not 0 <= var < 6:
            raise ValueError(f"variable index {var} out of range")
        return var
    try:
        return VARIABLES.index(var)
    except ValueError:
        raise ValueError(f"unknown variable {var!r}; expected one of {VARIABLES}") from None


def _gcd_all(den: int, *maps: Mapping[int, int]) -> int:
    g = den
    for m in maps:
        for v in m.values():
            g = math.gcd(g, v)
            if g == 1:
                return 1
    return g


class PhasePoly:
    """Immutable polynomial in (x, y, z, p1, p2, p3) over Q(sqrt(rho))."""

    __slots__ = ("_a", "_b", "_den", "rho", "degree_bound", "_hash")

    def __init__(self, rho: Fraction | int | str = 1, *, degree_bound: int = DEFAULT_DEGREE_BOUND):
        self._a: dict[int, int] = {}
        self._b: dict[int, int] = {}
        self._den = 1
        self.rho = parse_rational(rho)
        self.degree_bound = degree_bound
        self._hash = None
        normalize_rho(self.rho)  # validates rho > 0

    # -- construction -----------------------------------------------------
    @classmethod
    def _make(cls, a: dict, b: dict, den: int, rho: Fraction, bound: int = DEFAULT_DEGREE_BOUND) -> PhasePoly:
        if den < 0:
            den = -den
            a = {k: -v for k, v in a.items()}
            b = {k: -v for k, v in b.items()}
        if not a and not b:
            den = 1
        else:
            g = _gcd_all(den, a, b)
            if g != 1:
                den //= g
                a = {k: v // g for k, v in a.items()}
                b = {k: v // g for k, v in b.items()}
        obj = object.__new__(cls)
        obj._a = a
        obj._b = b
        obj._den = den
        obj.rho = rho
        obj.degree_bound = bound
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, rho=1) -> PhasePoly:
        return cls(rho)

    @classmethod
    def constant(cls, value: Scalar, rho=1) -> PhasePoly:
        return cls.from_terms({Monomial(): value}, rho)

    @classmethod
    def var(cls, name: str | int, rho=1) -> PhasePoly:
        exps = [0] * 6
        exps[_var_index(name)] = 1
        return cls.from_terms({tuple(exps): 1}, rho)

    @classmethod
    def variables(cls, rho=1) -> tuple[PhasePoly, ...]:
        return tuple(cls.var(name, rho) for name in VARIABLES)

    @classmethod
    def from_terms(cls, terms: Mapping[Sequence[int], Scalar] | Iterable, rho=1) -> PhasePoly:
        """Build from ``{exponent 6-tuple: coefficient}``; coefficients may be
        ints, Fractions, rational strings or QwScalars over the same rho."""
        rho = parse_rational(rho)
        items = terms.items() if isinstance(terms, Mapping) else terms
        fa: dict[int, Fraction] = {}
        fb: dict[int, Fraction] = {}
        for exps, coeff in items:
            key = pack(exps)
            if isinstance(coeff, QwScalar):
                if coeff.rho != rho:
                    raise FieldMismatchError(f"coefficient over rho={coeff.rho}, polynomial over rho={rho}")
                ca, cb = coeff.a, coeff.b
            else:
                ca, cb = parse_rational(coeff), Fraction(0)
            if ca:
                fa[key] = fa.get(key, Fraction(0)) + ca
            if cb:
                fb[key] = fb.get(key, Fraction(0)) + cb
        return cls._from_fractions(fa, fb, rho)

    @classmethod
    def _from_fractions(cls, fa: Mapping[int, Fraction], fb: Mapping[int, Fraction], rho: Fraction) -> PhasePoly:
        den = 1
        for v in list(fa.values()) + list(fb.values()):
            den = den * v.denominator // math.gcd(den, v.denominator)
        a = {k: int(v * den) for k, v in fa.items() if v}
        b = {k: int(v * den) for k, v in fb.items() if v}
        return cls._make(a, b, den, rho)

    # -- inspection -------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self._a) or bool(self._b)

    def is_zero(self) -> bool:
        return not self

    def __len__(self) -> int:
        return len(self._a.keys() | self._b.keys())

    def keys(self) -> list[int]:
        """Packed monomials in canonical (descending graded lex) order."""
        return sorted(self._a.keys() | self._b.keys(), key=_order_key, reverse=True)

    def coeff(self, exps: Sequence[int] | int) -> QwScalar:
        key = exps if isinstance(exps, int) else pack(exps)
        return QwScalar._raw(
            Fraction(self._a.get(key, 0), self._den),
            Fraction(self._b.get(key, 0), self._den),
            self.rho,
        )

    @property
    def terms(self) -> dict[Monomial, QwScalar]:
        return {unpack(k): self.coeff(k) for k in self.keys()}

    def degree(self) -> int:
        keys = self._a.keys() | self._b.keys()
        return max((key_degree(k) for k in keys), default=-1)

    def momentum_degree(self) -> int:
        return momentum_grade(self)[0] if self else -1

    def depends_on(self, var: str | int) -> bool:
        shift = 8 * _var_index(var)
        return any((k >> shift) & 0xFF for k in self._a.keys() | self._b.keys())

    def is_rational(self) -> bool:
        return not self._b

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, QwScalar)):
            other = PhasePoly.constant(other, self.rho)
        if not isinstance(other, PhasePoly):
            return NotImplemented
        return (
            self.rho == other.rho
            and self._den == other._den
            and self._a == other._a
            and self._b == other._b
        )

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rho, self._den, frozenset(self._a.items()), frozenset(self._b.items())))
        return self._hash

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: PhasePoly) -> None:
        if other.rho != self.rho:
            raise FieldMismatchError(f"rho mismatch: {self.rho} vs {other.rho}")

    def _lift(self, other) -> PhasePoly:
        if isinstance(other, PhasePoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, QwScalar, str)):
            return PhasePoly.constant(other, self.rho)
        return NotImplemented

    def __add__(self, other) -> PhasePoly:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return _add(self, other, 1)

    __radd__ = __add__

    def __sub__(self, other) -> PhasePoly:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return _add(self, other, -1)

    def __rsub__(self, other) -> PhasePoly:
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return _add(other, self, -1)

    def __neg__(self) -> PhasePoly:
        return PhasePoly._make(
            {k: -v for k, v in self._a.items()},
            {k: -v for k, v in self._b.items()},
            self._den,
            self.rho,
            self.degree_bound,
        )

    def __mul__(self, other) -> PhasePoly:
        if isinstance(other, (int, Fraction, QwScalar, str)):
            return self.scale(other)
        if not isinstance(other, PhasePoly):
            return NotImplemented
        self._check(other)
        return _mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other) -> PhasePoly:
        if isinstance(other, (int, Fraction, str)):
            return self.scale(1 / parse_rational(other))
        if isinstance(other, QwScalar):
            return self.scale(other.inverse())
        return NotImplemented

    def __pow__(self, k: int) -> PhasePoly:
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers need a non-negative integer exponent")
        result = PhasePoly.constant(1, self.rho)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, s: Scalar) -> PhasePoly:
        if isinstance(s, QwScalar):
            if s.rho != self.rho:
                raise FieldMismatchError(f"rho mismatch: {self.rho} vs {s.rho}")
            sa, sb = s.a, s.b
        else:
            sa, sb = parse_rational(s), Fraction(0)
        if not sa and not sb:
            return PhasePoly._make({}, {}, 1, self.rho, self.degree_bound)
        if not sb:
            return PhasePoly._make(
                {k: v * sa.numerator for k, v in self._a.items()},
                {k: v * sa.numerator for k, v in self._b.items()},
                self._den * sa.denominator,
                self.rho,
                self.degree_bound,
            )
        const = PhasePoly.from_terms({Monomial(): s}, self.rho)
        return _mul(self, const)

    # -- calculus ---------------------------------------------------------
    def diff(self, var: str | int) -> PhasePoly:
        return partial_derivative(self, var)

    def substitute(self, var: str | int, replacement: PhasePoly | Scalar) -> PhasePoly:
        return substitute(self, var, replacement)

    # -- evaluation -------------------------------------------------------
    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple, np.ndarray)):
            point = tuple(point[0])
        return evaluate(self, point)

    def float_coefficients(self) -> tuple[list[int], list[float]]:
        """Keys and double-precision coefficients, for fast numeric evaluation."""
        keys = self.keys()
        return keys, [self.coeff(k).to_float() for k in keys]

    # -- display ----------------------------------------------------------
    def __repr__(self) -> str:
        return f"PhasePoly({self}, rho={self.rho})"

    def __str__(self) -> str:
        if not self:
            return "0"
        parts = []
        for k in self.keys():
            c = self.coeff(k)
            mono = "*".join(
                f"{name}^{e}" if e > 1 else name for name, e in zip(VARIABLES, unpack(k)) if e
            )
            cs = str(c)
            if c.b and c.a:
                cs = f"({cs})"
            if mono:
                parts.append(mono if cs == "1" else ("-" + mono if cs == "-1" else f"{cs}*{mono}"))
            else:
                parts.append(cs)
        return " + ".join(parts).replace("+ -", "- ")

    # -- serialization ----------------------------------------------------
    def to_json(self) -> dict:
        terms = []
        for k in self.keys():
            c = self.coeff(k)
            terms.append({"exp": list(unpack(k)), "a": format_rational(c.a), "b": format_rational(c.b)})
        return {"rho": format_rational(self.rho), "terms": terms}

    @classmethod
    def from_json(cls, doc: Mapping) -> PhasePoly:
        rho = parse_rational(doc["rho"])
        fa: dict[int, Fraction] = {}
        fb: dict[int, Fraction] = {}
        for term in doc["terms"]:
            exps = term["exp"]
            if len(exps) != 6:
                raise ValueError(f"exponent vector must have 6 entries, got {exps!r}")
            c = QwScalar(term["a"], term.get("b", "0/1"), rho)
            key = pack(exps)
            if key in fa or key in fb:
                raise ValueError(f"duplicate monomial {exps!r}")
            if c.a:
                fa[key] = c.a
            if c.b:
                fb[key] = c.b
        return cls._from_fractions(fa, fb, rho)


# ---------------------------------------------------------------------------
# ring operations
# ---------------------------------------------------------------------------

def _add(p: PhasePoly, q: PhasePoly, sign: int) -> PhasePoly:
    g = math.gcd(p._den, q._den)
    fp = q._den // g
    fq = sign * (p._den // g)
    den = p._den * fp

    def merge(mp: dict, mq: dict) -> dict:
        out = {k: v * fp for k, v in mp.items()} if fp != 1 else dict(mp)
        for k, v in mq.items():
            nv = out.get(k, 0) + v * fq
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return out

    return PhasePoly._make(merge(p._a, q._a), merge(p._b, q._b), den, p.rho, p.degree_bound)


def _merge_into(target: dict, source: dict, factor: int) -> None:
    for k, v in source.items():
        nv = target.get(k, 0) + v * factor
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def _mul(p: PhasePoly, q: PhasePoly) -> PhasePoly:
    rho = p.rho
    bound = min(p.degree_bound, q.degree_bound)
    if not p or not q:
        return PhasePoly._make({}, {}, 1, rho, bound)
    degree = p.degree() + q.degree()
    if degree > bound:
        raise DegreeBoundError(degree, bound)
    mul = kernels.mul_terms
    if not p._b and not q._b:
        return PhasePoly._make(mul(p._a, q._a), {}, p._den * q._den, rho, bound)
    rn, rd = rho.numerator, rho.denominator
    # (A1 + wB1)(A2 + wB2) = A1A2 + rho B1B2 + w (A1B2 + B1A2)
    a: dict = {}
    b: dict = {}
    if p._a and q._a:
        _merge_into(a, mul(p._a, q._a), rd)
    if p._b and q._b:
        _merge_into(a, mul(p._b, q._b), rn)
    if p._a and q._b:
        _merge_into(b, mul(p._a, q._b), rd)
    if p._b and q._a:
        _merge_into(b, mul(p._b, q._a), rd)
    return PhasePoly._make(a, b, p._den * q._den * rd, rho, bound)


def poly_arith(lhs: PhasePoly, rhs: PhasePoly, op: str) -> PhasePoly:
    """Dispatch ``op`` in {'add', 'sub', 'mul'}."""
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(p: PhasePoly, var: str | int) -> PhasePoly:
    shift = 8 * _var_index(var)
    step = 1 << shift

    def d(m: dict) -> dict:
        out = {}
        for k, v in m.items():
            e = (k >> shift) & 0xFF
            if e:
                out[k - step] = v * e
        return out

    return PhasePoly._make(d(p._a), d(p._b), p._den, p.rho, p.degree_bound)


def poisson_bracket(f: PhasePoly, g: PhasePoly) -> PhasePoly:
    """Canonical bracket ``sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i``."""
    f._check(g)
    total = PhasePoly.zero(f.rho)
    for q, p in zip(COORDINATES, MOMENTA):
        fq = partial_derivative(f, q)
        gp = partial_derivative(g, p)
        if fq and gp:
            total = total + fq * gp
        fp = partial_derivative(f, p)
        gq = partial_derivative(g, q)
        if fp and gq:
            total = total - fp * gq
    return total


def substitute(p: PhasePoly, var: str | int, replacement: PhasePoly | Scalar) -> PhasePoly:
    """Replace every occurrence of ``var`` by ``replacement``."""
    idx = _var_index(var)
    shift = 8 * idx
    if not isinstance(replacement, PhasePoly):
        replacement = PhasePoly.constant(replacement, p.rho)
    p._check(replacement)
    # group terms by the exponent of var
    groups: dict[int, tuple[dict, dict]] = {}
    for src, slot in ((p._a, 0), (p._b, 1)):
        for k, v in src.items():
            e = (k >> shift) & 0xFF
            bucket = groups.setdefault(e, ({}, {}))
            bucket[slot][k - (e << shift)] = v
    result = PhasePoly.zero(p.rho)
    power = PhasePoly.constant(1, p.rho)
    current = 0
    for e in sorted(groups):
        while current < e:
            power = power * replacement
            current += 1
        ga, gb = groups[e]
        rest = PhasePoly._make(ga, gb, p._den, p.rho, p.degree_bound)
        result = result + rest * power
    return result


def substitute_linear(p: PhasePoly, var: str | int, replacement: PhasePoly | Scalar) -> PhasePoly:
    """Compose with an affine replacement ``var -> replacement``."""
    if isinstance(replacement, PhasePoly) and replacement.degree() > 1:
        raise ValueError(f"replacement must have total degree <= 1, got {replacement.degree()}")
    return substitute(p, var, replacement)


def gauge_transform(p: PhasePoly, chi: PhasePoly) -> PhasePoly:
    """Apply ``p_j -> p_j - d(chi)/dx_j`` for a coordinate-only gauge function."""
    if any(chi.depends_on(m) for m in MOMENTA):
        raise ValueError("gauge function must depend on coordinates only")
    result = p
    # replacements contain no momenta, so sequential substitution is simultaneous
    for q, mom in zip(COORDINATES, MOMENTA):
        grad = partial_derivative(chi, q)
        if grad:
            result = substitute(result, mom, PhasePoly.var(mom, p.rho) - grad)
    return result


def momentum_grade(p: PhasePoly) -> tuple[int, PhasePoly]:
    """Highest total momentum degree and the sum of terms attaining it."""
    if not p:
        raise ValueError("momentum grade of the zero polynomial is undefined")
    keys = p._a.keys() | p._b.keys()
    degree = max(key_momentum_degree(k) for k in keys)
    return degree, momentum_part(p, degree)


def momentum_part(p: PhasePoly, degree: int) -> PhasePoly:
    """Terms of momentum degree exactly ``degree``."""
    a = {k: v for k, v in p._a.items() if key_momentum_degree(k) == degree}
    b = {k: v for k, v in p._b.items() if key_momentum_degree(k) == degree}
    return PhasePoly._make(a, b, p._den, p.rho, p.degree_bound)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, str)) and not isinstance(value, bool)


def evaluate(p: PhasePoly, point: Sequence) -> QwScalar | float:
    """Exact value at a rational point, double precision otherwise."""
    if len(point) != 6:
        raise ValueError(f"phase point needs 6 coordinates, got {len(point)}")
    if all(_is_exact(v) for v in point):
        return _evaluate_exact(p, [parse_rational(v) for v in point])
    keys, coeffs = p.float_coefficients()
    return kernels.eval_float(keys, coeffs, [float(v) for v in point])


def _evaluate_exact(p: PhasePoly, point: list[Fraction]) -> QwScalar:
    keys = p._a.keys() | p._b.keys()
    if not keys:
        return QwScalar._raw(Fraction(0), Fraction(0), p.rho)
    tops = [0] * 6
    for k in keys:
        for i in range(6):
            e = (k >> (8 * i)) & 0xFF
            if e > tops[i]:
                tops[i] = e
    # scale every monomial by prod d_i^top_i so all term values are integers
    tables = []
    common = 1
    for value, top in zip(point, tops):
        n, d = value.numerator, value.denominator
        npow = [1] * (top + 1)
        dpow = [1] * (top + 1)
        for e in range(1, top + 1):
            npow[e] = npow[e - 1] * n
            dpow[e] = dpow[e - 1] * d
        tables.append([npow[e] * dpow[top - e] for e in range(top + 1)])
        common *= dpow[top]

    def mono(k: int) -> int:
        t = 1
        for i in range(6):
            e = (k >> (8 * i)) & 0xFF
            t *= tables[i][e]
        return t

    sa = sum(v * mono(k) for k, v in p._a.items())
    sb = sum(v * mono(k) for k, v in p._b.items())
    scale = p._den * common
    return QwScalar(Fraction(sa, scale), Fraction(sb, scale), p.rho)


def evaluate_many(p: PhasePoly, points: np.ndarray) -> np.ndarray:
    """Vectorized double-precision evaluation at rows of an ``(N, 6)`` array."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 6:
        raise ValueError("points must have shape (N, 6)")
    keys, coeffs = p.float_coefficients()
    out = np.zeros(points.shape[0])
    if not keys:
        return out
    exps = np.array([unpack(k) for k in keys], dtype=int)
    tops = exps.max(axis=0)
    powers = []
    for i in range(6):
        table = np.ones((tops[i] + 1, points.shape[0]))
        for e in range(1, tops[i] + 1):
            table[e] = table[e - 1] * points[:, i]
        powers.append(table)
    for row, c in zip(exps, coeffs):
        term = np.full(points.shape[0], c)
        for i in range(6):
            if row[i]:
                term = term * powers[i][row[i]]
        out += term
    return out
