"""Exact verification suite for one parameter set."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .dynamics import five_integrals, independence_rank, random_rational_point
from .model import (
    IntegralSet,
    InvariantViolation,
    SystemParams,
    attempt_reduce_X5,
    binomial_series_invariants,
    build_integrals,
)
from .phasepoly import PhasePoly, momentum_grade, poisson_bracket


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    residual: PhasePoly | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        doc = {"name": self.name, "passed": self.passed, "detail": self.detail}
        if self.residual is not None and not self.passed:
            doc["residual"] = self.residual.to_json()
        return doc


def _zero_check(name: str, poly: PhasePoly) -> Check:
    if poly.is_zero():
        return Check(name, True, "exact zero")
    return Check(name, False, f"{len(poly)} nonzero terms", poly)


def run_checks(params: SystemParams, seed: int = 0, integrals: IntegralSet | None = None) -> list[Check]:
    integrals = integrals or build_integrals(params)
    m, n = params.m, params.n
    osc = integrals.oscillator
    checks: list[Check] = []

    for name, poly in integrals.items():
        if name != "H":
            checks.append(_zero_check(f"bracket {{H, {name}}}", poisson_bracket(integrals.H, poly)))

    dep = integrals.H - (integrals.X0**2 + integrals.X1 + integrals.X2) * Fraction(1, 2)
    checks.append(_zero_check("H = (X0^2 + X1 + X2)/2", dep))

    syz = osc.I3**2 + osc.I4**2 - osc.I1**n * osc.I2**m
    checks.append(_zero_check("syzygy I3^2 + I4^2 = I1^n I2^m", syz))
    checks.append(_zero_check("bracket {H2, I3}", poisson_bracket(osc.H2, osc.I3)))
    checks.append(_zero_check("bracket {H2, I4}", poisson_bracket(osc.H2, osc.I4)))

    s3, s4 = binomial_series_invariants(params)
    checks.append(_zero_check("I3 matches binomial series", osc.I3 - s3))
    checks.append(_zero_check("I4 matches binomial series", osc.I4 - s4))

    deg4 = momentum_grade(integrals.X4_reduced)[0]
    checks.append(Check("order of reduced X4 = m+n-1", deg4 == m + n - 1, f"momentum degree {deg4}"))
    deg5 = momentum_grade(integrals.X5)[0]
    checks.append(Check("order of X5 = m+n", deg5 == m + n, f"momentum degree {deg5}"))

    try:
        attempt_reduce_X5(integrals.X5, {k: integrals[k] for k in ("X0", "X1", "X2", "X3")}, params)
        checks.append(Check("X5 leading part irreducible", True, "leading-part solve infeasible"))
    except InvariantViolation as exc:
        checks.append(Check("X5 leading part irreducible", False, str(exc)))

    point = random_rational_point(random.Random(seed))
    five = five_integrals(integrals)
    rank = independence_rank(five, point)
    checks.append(Check("rank of d(X0..X3, X4_reduced) = 5", rank == 5, f"rank {rank} at {_fmt_point(point)}"))
    with_x5 = five[:4] + [integrals.X5]
    rank5 = independence_rank(with_x5, point)
    checks.append(Check("rank of d(X0..X3, X5) = 5", rank5 == 5, f"rank {rank5}"))
    # H depends on X0, X1, X2 only, so swapping it in leaves the rank of X0..X3
    rank_h = independence_rank(five[:4] + [integrals.H], point)
    checks.append(Check("rank with H in place of X4_reduced = 4", rank_h == 4, f"rank {rank_h}"))
    rank_dep = independence_rank(five[:3] + [integrals.H], point)
    checks.append(Check("rank of d(X0, X1, X2, H) = 3", rank_dep == 3, f"rank {rank_dep}"))
    return checks


def _fmt_point(point) -> str:
    return "(" + ", ".join(str(v) for v in point) + ")"
