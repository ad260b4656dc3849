"""The magnetic system, its integrals of motion and the order reduction.

Magnetic field ``B = (-W1, W2, 0)`` with effective potential
``W = (W1*W2 / 2S) (S x - y)**2`` where ``S = W1 kappa**2 / W2`` and
``kappa = m/n``. All polynomials are built in the fixed gauge
``A = (0, 0, -W2 x - W1 y)`` with ``W1 = omega1_field``, ``W2 = omega2_field``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Sequence

from .exactfield import QwScalar, format_rational, parse_rational, solve_linear
from .phasepoly import (
    PhasePoly,
    momentum_grade,
    momentum_part,
    poisson_bracket,
    substitute_linear,
    unpack,
)


class ParameterError(ValueError):
    """Invalid system parameters."""


class InvariantViolation(RuntimeError):
    """A mathematical identity that must hold failed."""


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SystemParams:
    omega1_field: Fraction
    omega2_field: Fraction
    m: int
    n: int

    def __post_init__(self):
        w1 = parse_rational(self.omega1_field)
        w2 = parse_rational(self.omega2_field)
        object.__setattr__(self, "omega1_field", w1)
        object.__setattr__(self, "omega2_field", w2)
        if w1 <= 0 or w2 <= 0:
            raise ParameterError(f"field strengths must be positive, got Omega1={w1}, Omega2={w2}")
        if not isinstance(self.m, int) or not isinstance(self.n, int) or self.m < 1 or self.n < 1:
            raise ParameterError(f"m and n must be positive integers, got m={self.m}, n={self.n}")
        g = math.gcd(self.m, self.n)
        if g != 1:
            raise ParameterError(
                f"m and n must be coprime: reduce m/n to lowest terms ({self.m // g}/{self.n // g})"
            )

    @property
    def kappa(self) -> Fraction:
        return Fraction(self.m, self.n)

    @property
    def S(self) -> Fraction:
        return self.m**2 * self.omega1_field / (self.n**2 * self.omega2_field)

    @property
    def rho(self) -> Fraction:
        """omega**2 = Omega1**2/n**2 + Omega2**2/m**2."""
        return self.omega1_field**2 / self.n**2 + self.omega2_field**2 / self.m**2

    @property
    def omega(self) -> QwScalar:
        return QwScalar.omega(self.rho)

    @property
    def freq1(self) -> QwScalar:
        return self.omega * self.m

    @property
    def freq2(self) -> QwScalar:
        return self.omega * self.n

    @property
    def tau(self) -> QwScalar:
        """m*n*omega = sqrt(m**2 Omega1**2 + n**2 Omega2**2); 6*omega for (m, n) = (3, 2)."""
        return self.omega * (self.m * self.n)

    @property
    def coupling(self) -> Fraction:
        """Omega1*S + Omega2."""
        return self.omega1_field * self.S + self.omega2_field

    @property
    def shift_denominator(self) -> Fraction:
        return self.n**2 * self.omega2_field**2 + self.m**2 * self.omega1_field**2

    @property
    def period(self) -> float:
        return 2 * math.pi / math.sqrt(self.rho)

    def to_json(self) -> dict:
        w = self.omega
        return {
            "omega1": format_rational(self.omega1_field),
            "omega2": format_rational(self.omega2_field),
            "m": self.m,
            "n": self.n,
            "S": format_rational(self.S),
            "kappa": format_rational(self.kappa),
            "omega_squared": format_rational(self.rho),
            "omega1_freq_squared": format_rational(self.m**2 * self.rho),
            "omega2_freq_squared": format_rational(self.n**2 * self.rho),
            "coupling": format_rational(self.coupling),
            "tau": self.tau.to_json(),
            "floats": {
                "S": float(self.S),
                "kappa": float(self.kappa),
                "omega": w.to_float(),
                "omega1_freq": self.freq1.to_float(),
                "omega2_freq": self.freq2.to_float(),
                "coupling": float(self.coupling),
                "period": self.period,
            },
        }


def derive_params(omega1, omega2, m: int, n: int) -> SystemParams:
    return SystemParams(parse_rational(omega1), parse_rational(omega2), m, n)


# ---------------------------------------------------------------------------
# system and first integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MagneticSystem:
    params: SystemParams
    W: PhasePoly
    A: tuple[PhasePoly, PhasePoly, PhasePoly]
    covariant_momenta: tuple[PhasePoly, PhasePoly, PhasePoly]
    H: PhasePoly


def build_system(params: SystemParams) -> MagneticSystem:
    rho = params.rho
    w1, w2, S = params.omega1_field, params.omega2_field, params.S
    x, y, z, p1, p2, p3 = PhasePoly.variables(rho)
    zero = PhasePoly.zero(rho)
    A = (zero, zero, -(x * w2) - y * w1)
    pA = (p1 + A[0], p2 + A[1], p3 + A[2])
    W = (x * S - y) ** 2 * (w1 * w2 / (2 * S))
    H = (pA[0] ** 2 + pA[1] ** 2 + pA[2] ** 2) * Fraction(1, 2) + W
    return MagneticSystem(params, W, A, pA, H)


def build_first_integrals(params: SystemParams, system: MagneticSystem | None = None) -> dict[str, PhasePoly]:
    system = system or build_system(params)
    w1, w2, S = params.omega1_field, params.omega2_field, params.S
    rho = params.rho
    x, y, z, _, _, _ = PhasePoly.variables(rho)
    pa1, pa2, pa3 = system.covariant_momenta
    X0 = pa3 + x * w2 + y * w1
    X1 = pa1**2 - x * pa3 * (2 * w2) - x**2 * w2**2 + x * (x * S - y * 2) * (w1 * w2)
    X2 = pa2**2 - y * pa3 * (2 * w1) - y**2 * w1**2 + y * (y - x * (2 * S)) * (w1 * w2 / S)
    X3 = pa1 + pa2 * S - z * (S * w1 + w2)
    return {"X0": X0, "X1": X1, "X2": X2, "X3": X3}


# ---------------------------------------------------------------------------
# Chebyshev polynomials
# ---------------------------------------------------------------------------

def _poly_mul(p: Sequence[int], q: Sequence[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _poly_pow(p: Sequence[int], k: int) -> list[int]:
    out = [1]
    for _ in range(k):
        out = _poly_mul(out, p)
    return out


def chebyshev(kind: str, n: int) -> list[int]:
    """Coefficients (lowest power first) of T_n or U_n from the binomial sums

    ``T_n(a) = sum_k C(n, 2k) a**(n-2k) (a**2 - 1)**k`` and
    ``U_n(a) = sum_k C(n+1, 2k+1) a**(n-2k) (a**2 - 1)**k``.
    """
    if n < 0:
        raise ValueError("Chebyshev degree must be non-negative")
    if kind not in ("T", "U"):
        raise ValueError(f"kind must be 'T' or 'U', got {kind!r}")
    coeffs = [0] * (n + 1)
    for k in range(n // 2 + 1):
        weight = comb(n, 2 * k) if kind == "T" else comb(n + 1, 2 * k + 1)
        term = _poly_mul([0] * (n - 2 * k) + [1], _poly_pow([-1, 0, 1], k))
        for i, c in enumerate(term):
            coeffs[i] += weight * c
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


# ---------------------------------------------------------------------------
# two degree-of-freedom oscillator invariants
# ---------------------------------------------------------------------------

ComplexPair = tuple[PhasePoly, PhasePoly]


def _cmul(u: ComplexPair, v: ComplexPair) -> ComplexPair:
    return u[0] * v[0] - u[1] * v[1], u[0] * v[1] + u[1] * v[0]


def _cpow(u: ComplexPair, k: int) -> ComplexPair:
    rho = u[0].rho
    result: ComplexPair = (PhasePoly.constant(1, rho), PhasePoly.zero(rho))
    base = u
    while k:
        if k & 1:
            result = _cmul(result, base)
        k >>= 1
        if k:
            base = _cmul(base, base)
    return result


@dataclass(frozen=True)
class OscillatorInvariants:
    """Invariants of the reduced oscillator.

    The shifted variables (X, Y, P1, P2) occupy the (x, y, p1, p2) slots of the
    phase-space ring; p3 plays the role of a parameter.
    """

    params: SystemParams
    H2: PhasePoly
    I1: PhasePoly
    I2: PhasePoly
    I3: PhasePoly
    I4: PhasePoly


def build_oscillator_invariants(params: SystemParams) -> OscillatorInvariants:
    rho = params.rho
    m, n = params.m, params.n
    X, Y, _, P1, P2, _ = PhasePoly.variables(rho)
    w = params.omega
    z1: ComplexPair = (X * (w * m), P1)
    z2bar: ComplexPair = (Y * (w * n), -P2)
    I3, I4 = _cmul(_cpow(z1, n), _cpow(z2bar, m))
    I1 = P1**2 + X**2 * (m**2 * rho)
    I2 = P2**2 + Y**2 * (n**2 * rho)
    H2 = (P1**2 + P2**2) * Fraction(1, 2) + (X**2 * m**2 + Y**2 * n**2) * (rho / 2)
    return OscillatorInvariants(params, H2, I1, I2, I3, I4)


def binomial_series_invariants(
    params: SystemParams, X: PhasePoly | None = None, Y: PhasePoly | None = None
) -> tuple[PhasePoly, PhasePoly]:
    """I3, I4 from the explicit binomial sums, term by term.

    With ``E1 + i O1 = (i P1 + m w X)**n`` and ``E2 - i O2 = (-i P2 + n w Y)**m``
    this returns ``(E1 E2 + O1 O2, O1 E2 - E1 O2)``. ``X`` and ``Y`` default to
    the bare coordinates; pass shifted expressions to get the lifted integrals.
    """
    rho = params.rho
    m, n = params.m, params.n
    x, y, _, p1, p2, _ = PhasePoly.variables(rho)
    X = x if X is None else X
    Y = y if Y is None else Y
    w = params.omega
    mwX = X * (w * m)
    nwY = Y * (w * n)

    def even(base: PhasePoly, mom: PhasePoly, deg: int) -> PhasePoly:
        return sum(
            (base ** (deg - 2 * k) * mom ** (2 * k) * ((-1) ** k * comb(deg, 2 * k)) for k in range(deg // 2 + 1)),
            PhasePoly.zero(rho),
        )

    def odd(base: PhasePoly, mom: PhasePoly, deg: int) -> PhasePoly:
        return sum(
            (
                base ** (deg - 2 * k - 1) * mom ** (2 * k + 1) * ((-1) ** k * comb(deg, 2 * k + 1))
                for k in range((deg - 1) // 2 + 1)
            ),
            PhasePoly.zero(rho),
        )

    E1, O1 = even(mwX, p1, n), odd(mwX, p1, n)
    E2, O2 = even(nwY, p2, m), odd(nwY, p2, m)
    return E1 * E2 + O1 * O2, O1 * E2 - E1 * O2


# ---------------------------------------------------------------------------
# lifted integrals and order reduction
# ---------------------------------------------------------------------------

def shifted_coordinates(params: SystemParams, X0: PhasePoly) -> tuple[PhasePoly, PhasePoly]:
    """Inverse shift: (x - n^2 W2 X0 / D, y - m^2 W1 X0 / D), D = n^2 W2^2 + m^2 W1^2."""
    rho = params.rho
    x, y, *_ = PhasePoly.variables(rho)
    D = params.shift_denominator
    return (
        x - X0 * (params.n**2 * params.omega2_field / D),
        y - X0 * (params.m**2 * params.omega1_field / D),
    )


def build_higher_integrals(
    params: SystemParams, osc: OscillatorInvariants | None = None, X0: PhasePoly | None = None
) -> dict[str, PhasePoly]:
    """X4_raw and X5: I3 and I4 pulled back through the inverse shift."""
    osc = osc or build_oscillator_invariants(params)
    if X0 is None:
        X0 = build_first_integrals(params)["X0"]
    Xt, Yt = shifted_coordinates(params, X0)
    out = {}
    for name, inv in (("X4_raw", osc.I3), ("X5", osc.I4)):
        # Xt is free of y, so the second substitution cannot touch it
        lifted = substitute_linear(inv, "x", Xt)
        lifted = substitute_linear(lifted, "y", Yt)
        out[name] = lifted
    return out


@dataclass(frozen=True)
class ReductionTerm:
    kind: str  # "even": X0^e X1^k X2^j, "odd": X0^e X1^k X2^j G
    k: int
    j: int
    x0_power: int
    coefficient: QwScalar

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "k": self.k,
            "j": self.j,
            "x0_power": self.x0_power,
            "coefficient": self.coefficient.to_json(),
        }


@dataclass(frozen=True)
class ReductionResult:
    reduced: PhasePoly
    unnormalized: PhasePoly
    terms: tuple[ReductionTerm, ...]
    normalization: QwScalar
    normalization_monomial: tuple[int, ...]


def odd_generator(params: SystemParams, basis: dict[str, PhasePoly]) -> PhasePoly:
    """G = (W2 / (kappa^2 W1)) (X3^2 - X1) - (kappa^2 W1 / W2) X2; leading part 2 p1 p2."""
    S = params.S
    return (basis["X3"] ** 2 - basis["X1"]) * (1 / S) - basis["X2"] * S


def _candidates(params: SystemParams, basis: dict[str, PhasePoly]) -> list[tuple[str, int, int, int, PhasePoly]]:
    m, n = params.m, params.n
    N = m + n
    X0, X1, X2 = basis["X0"], basis["X1"], basis["X2"]
    G = odd_generator(params, basis)
    cache: dict[tuple[str, int], PhasePoly] = {}

    def power(name: str, poly: PhasePoly, e: int) -> PhasePoly:
        if (name, e) not in cache:
            cache[(name, e)] = poly**e
        return cache[(name, e)]

    out = []
    for k in range(n // 2 + 1):
        for j in range(m // 2 + 1):
            e = N - 2 * k - 2 * j
            out.append(("even", k, j, e, power("X0", X0, e) * power("X1", X1, k) * power("X2", X2, j)))
    for k in range((n - 1) // 2 + 1):
        for j in range((m - 1) // 2 + 1):
            e = N - 2 * k - 2 * j - 2
            out.append(("odd", k, j, e, power("X0", X0, e) * power("X1", X1, k) * power("X2", X2, j) * G))
    return out


def _solve_leading(
    target: PhasePoly, candidates: list[tuple[str, int, int, int, PhasePoly]], degree: int
) -> list[QwScalar] | None:
    rho = target.rho
    top_target = momentum_part(target, degree)
    tops = [momentum_part(c[4], degree) for c in candidates]
    monomials = sorted(set(top_target.keys()).union(*(t.keys() for t in tops)))
    matrix = [[t.coeff(mono) for t in tops] for mono in monomials]
    rhs = [top_target.coeff(mono) for mono in monomials]
    if not monomials:
        zero = QwScalar(0, 0, rho)
        return [zero] * len(candidates)
    return solve_linear(matrix, rhs)


def normalize_leading(poly: PhasePoly) -> tuple[PhasePoly, QwScalar, tuple[int, ...]]:
    """Divide by the coefficient of the largest monomial of the top momentum part."""
    _, lead = momentum_grade(poly)
    key = lead.keys()[0]
    c = lead.coeff(key)
    return poly.scale(c.inverse()), c, tuple(unpack(key))


def reduce_order(X4_raw: PhasePoly, basis: dict[str, PhasePoly], params: SystemParams) -> ReductionResult:
    """Subtract products of X0..X3 that cancel the momentum-degree m+n part of X4_raw."""
    N = params.m + params.n
    degree, _ = momentum_grade(X4_raw)
    if degree != N:
        raise InvariantViolation(f"X4_raw has momentum degree {degree}, expected {N}")
    candidates = _candidates(params, basis)
    coeffs = _solve_leading(X4_raw, candidates, N)
    if coeffs is None:
        raise InvariantViolation("leading part of X4 is not spanned by products of X0..X3")
    reduced = X4_raw
    terms = []
    for (kind, k, j, e, poly), c in zip(candidates, coeffs):
        if c:
            reduced = reduced - poly.scale(c)
        terms.append(ReductionTerm(kind, k, j, e, c))
    new_degree, _ = momentum_grade(reduced)
    if new_degree >= N:
        raise InvariantViolation(f"reduction left momentum degree {new_degree}")
    normalized, scale, mono = normalize_leading(reduced)
    return ReductionResult(normalized, reduced, tuple(terms), scale, mono)


@dataclass(frozen=True)
class ReductionAttempt:
    reducible: bool
    momentum_degree: int


def attempt_reduce_X5(X5: PhasePoly, basis: dict[str, PhasePoly], params: SystemParams) -> ReductionAttempt:
    """Run the leading-part solve on X5; a solution would contradict irreducibility."""
    N = params.m + params.n
    degree, _ = momentum_grade(X5)
    if degree != N:
        raise InvariantViolation(f"X5 has momentum degree {degree}, expected {N}")
    coeffs = _solve_leading(X5, _candidates(params, basis), N)
    if coeffs is not None:
        raise InvariantViolation("leading part of X5 is spanned by products of X0..X3")
    return ReductionAttempt(False, degree)


# ---------------------------------------------------------------------------
# complete integral set
# ---------------------------------------------------------------------------

INTEGRAL_NAMES = ("H", "X0", "X1", "X2", "X3", "X4_raw", "X4_reduced", "X5")


@dataclass(frozen=True)
class IntegralSet:
    params: SystemParams
    H: PhasePoly
    X0: PhasePoly
    X1: PhasePoly
    X2: PhasePoly
    X3: PhasePoly
    X4_raw: PhasePoly
    X5: PhasePoly
    X4_reduced: PhasePoly
    reduction: ReductionResult
    oscillator: OscillatorInvariants = field(repr=False)

    def __getitem__(self, name: str) -> PhasePoly:
        if name not in INTEGRAL_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def items(self):
        return [(name, self[name]) for name in INTEGRAL_NAMES]

    @cached_property
    def momentum_degrees(self) -> dict[str, int]:
        return {name: poly.momentum_degree() for name, poly in self.items()}

    @property
    def conserved(self) -> dict[str, PhasePoly]:
        """The seven quantities tracked along trajectories."""
        return {name: self[name] for name in ("H", "X0", "X1", "X2", "X3", "X4_reduced", "X5")}

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "rho": format_rational(self.params.rho),
            "integrals": {name: poly.to_json() for name, poly in self.items()},
            "momentum_degrees": self.momentum_degrees,
            "reduction_report": {
                "terms": [t.to_json() for t in self.reduction.terms],
                "normalization": self.reduction.normalization.to_json(),
                "normalization_monomial": list(self.reduction.normalization_monomial),
            },
        }


def build_integrals(params: SystemParams) -> IntegralSet:
    system = build_system(params)
    first = build_first_integrals(params, system)
    osc = build_oscillator_invariants(params)
    higher = build_higher_integrals(params, osc, first["X0"])
    reduction = reduce_order(higher["X4_raw"], first, params)
    return IntegralSet(
        params=params,
        H=system.H,
        X4_raw=higher["X4_raw"],
        X5=higher["X5"],
        X4_reduced=reduction.reduced,
        reduction=reduction,
        oscillator=osc,
        **first,
    )


def bracket_with_hamiltonian(integrals: IntegralSet) -> dict[str, PhasePoly]:
    return {name: poisson_bracket(integrals.H, poly) for name, poly in integrals.items() if name != "H"}


# ---------------------------------------------------------------------------
# rotated frame
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RotatedFrame:
    omega_hat: float
    b_hat: float
    beta: float

    def frequencies(self) -> tuple[float, float]:
        """The two normal-mode frequencies, larger first."""
        s = self.b_hat**2 + self.omega_hat**2
        disc = math.sqrt(s * s - 4 * self.b_hat**2 * self.omega_hat**2 * math.cos(self.beta) ** 2)
        return math.sqrt(s + disc) / math.sqrt(2), math.sqrt(max(s - disc, 0.0)) / math.sqrt(2)


def rotated_frame(params: SystemParams) -> RotatedFrame:
    k2 = float(params.kappa) ** 2
    w1, w2 = float(params.omega1_field), float(params.omega2_field)
    omega_hat = math.sqrt(k2 * w1**2 + w2**2 / k2)
    norm = math.sqrt(w2**2 + k2**2 * w1**2)
    bx = (-k2 * w1**2 - w2**2) / norm
    by = w1 * w2 * (k2 - 1) / norm
    return RotatedFrame(omega_hat, math.hypot(bx, by), math.atan2(by, bx))
