"""Trajectories, conservation drift and functional independence.

Units: mass 1, time in the same units as ``1/Omega``. States are
``(x, y, z, p1, p2, p3)`` in the fixed gauge, where ``p3`` is conserved.
"""
from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import kernels
from .exactfield import QwScalar, bareiss_rank
from .model import IntegralSet, SystemParams
from .phasepoly import VARIABLES, PhasePoly, evaluate, evaluate_many, partial_derivative

PhasePoint = Sequence


# ---------------------------------------------------------------------------
# closed-form solution
# ---------------------------------------------------------------------------

def closed_form_raw(omega1_field: float, omega2_field: float, S: float, initial: PhasePoint, t):
    """Closed-form solution for arbitrary real ``S`` (no rationality needed).

    The z component integrates ``zdot = p3 - W2 x - W1 y``; note the factor
    ``S`` on the ``sin(f2 t)`` term, which the y-oscillation carries through
    ``W1 / f2**2 = S / (W1 S + W2)``.

    ``t`` may be a scalar or an array; the result has shape ``(6,)`` or
    ``(len(t), 6)``.
    """
    w1, w2, S = float(omega1_field), float(omega2_field), float(S)
    x0, y0, z0, p10, p20, p30 = (float(v) for v in initial)
    coupling = w1 * S + w2
    f1 = math.sqrt(w2 * coupling)
    f2 = math.sqrt(w1 / S * coupling)
    t = np.asarray(t, dtype=float)
    c1, s1 = np.cos(f1 * t), np.sin(f1 * t)
    c2, s2 = np.cos(f2 * t), np.sin(f2 * t)
    ax = f1 * f1 * x0 - w2 * p30
    ay = f2 * f2 * y0 - w1 * p30
    x = (ax * c1 + f1 * p10 * s1 + w2 * p30) / (f1 * f1)
    y = (ay * c2 + f2 * p20 * s2 + w1 * p30) / (f2 * f2)
    z = (
        p10 * (c1 - 1)
        + S * p20 * (c2 - 1)
        + (w2 * p30 - f1 * f1 * x0) / f1 * s1
        + S * (w1 * p30 - f2 * f2 * y0) / f2 * s2
    ) / coupling + z0
    p1 = -ax / f1 * s1 + p10 * c1
    p2 = -ay / f2 * s2 + p20 * c2
    p3 = np.full_like(t, p30)
    return np.stack([x, y, z, p1, p2, p3], axis=-1)


def closed_form_state(params: SystemParams, initial: PhasePoint, t):
    return closed_form_raw(params.omega1_field, params.omega2_field, params.S, initial, t)


# ---------------------------------------------------------------------------
# RK4 on the Hamiltonian vector field
# ---------------------------------------------------------------------------

class HamiltonianFlow:
    """Vector field ``(dH/dp, -dH/dq)`` with exactly differentiated components."""

    def __init__(self, H: PhasePoly):
        self.H = H
        self._components = []
        for p in VARIABLES[3:]:
            self._components.append(partial_derivative(H, p).float_coefficients())
        for q in VARIABLES[:3]:
            keys, coeffs = partial_derivative(H, q).float_coefficients()
            self._components.append((keys, [-c for c in coeffs]))

    def __call__(self, state: Sequence[float]) -> list[float]:
        ev = kernels.eval_float
        return [ev(keys, coeffs, state) for keys, coeffs in self._components]


@lru_cache(maxsize=32)
def _flow(H: PhasePoly) -> HamiltonianFlow:
    return HamiltonianFlow(H)


def _rk4(flow: HamiltonianFlow, state: list[float], dt: float) -> list[float]:
    k1 = flow(state)
    k2 = flow([s + 0.5 * dt * k for s, k in zip(state, k1)])
    k3 = flow([s + 0.5 * dt * k for s, k in zip(state, k2)])
    k4 = flow([s + dt * k for s, k in zip(state, k3)])
    new = [s + dt / 6.0 * (a + 2 * b + 2 * c + d) for s, a, b, c, d in zip(state, k1, k2, k3, k4)]
    if not all(math.isfinite(v) for v in new):
        raise FloatingPointError(f"non-finite state after RK4 step: {new}")
    return new


def rk4_step(H: PhasePoly, state: PhasePoint, dt: float) -> list[float]:
    """One classical Runge-Kutta step of Hamilton's equations."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return _rk4(_flow(H), [float(v) for v in state], float(dt))


def integrate_rk4(H: PhasePoly, initial: PhasePoint, dt: float, steps: int, sample_every: int = 1):
    """Integrate ``steps`` RK4 steps; returns (times, states) sampled every ``sample_every``."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    flow = _flow(H)
    state = [float(v) for v in initial]
    times = [0.0]
    states = [state]
    for i in range(1, steps + 1):
        state = _rk4(flow, state, dt)
        if i % sample_every == 0 or i == steps:
            times.append(i * dt)
            states.append(state)
    return np.array(times), np.array(states)


# ---------------------------------------------------------------------------
# trajectories and drift
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectorySpec:
    initial: tuple
    t_end: float
    dt: float
    method: str = "closed_form"

    def __post_init__(self):
        if self.method not in ("closed_form", "rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if len(self.initial) != 6:
            raise ValueError("initial point needs 6 coordinates")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    method: str

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self.to_csv(fh)

    def to_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", *VARIABLES])
        for t, row in zip(self.times, self.states):
            writer.writerow([f"{v:.17g}" for v in (t, *row)])


def _steps(t_end: float, dt: float) -> int:
    # tolerate t_end being an exact multiple of dt up to roundoff
    return int(math.floor(t_end / dt + 1e-9))


def generate(params: SystemParams, integrals: IntegralSet | None, spec: TrajectorySpec) -> Trajectory:
    steps = _steps(spec.t_end, spec.dt)
    if spec.method == "closed_form":
        times = np.arange(steps + 1) * spec.dt
        if steps and spec.t_end - times[-1] > 1e-12:
            times = np.append(times, spec.t_end)
        states = closed_form_state(params, spec.initial, times).reshape(-1, 6)
        return Trajectory(times, states, "closed_form")
    if integrals is None:
        from .model import build_system

        H = build_system(params).H
    else:
        H = integrals.H
    if steps == 0:
        return Trajectory(np.array([0.0]), np.array([[float(v) for v in spec.initial]]), "rk4")
    dt = spec.t_end / steps
    times, states = integrate_rk4(H, spec.initial, dt, steps)
    return Trajectory(times, states, "rk4")


@dataclass
class DriftRecord:
    initial: float
    max_abs_deviation: float
    relative_drift: float

    def to_json(self) -> dict:
        return {
            "initial": self.initial,
            "max_abs_deviation": self.max_abs_deviation,
            "relative_drift": self.relative_drift,
        }


@dataclass
class DriftReport:
    method: str
    samples: int
    records: dict[str, DriftRecord]
    closure_error: float
    period: float
    closure_components: list[float] = field(default_factory=list)

    @property
    def max_relative_drift(self) -> float:
        return max((r.relative_drift for r in self.records.values()), default=0.0)

    def within(self, budget: float) -> bool:
        return self.max_relative_drift <= budget

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "samples": self.samples,
            "period": self.period,
            "closure_error": self.closure_error,
            "closure_components": self.closure_components,
            "max_relative_drift": self.max_relative_drift,
            "integrals": {name: rec.to_json() for name, rec in self.records.items()},
        }


def drift_records(integrals: dict[str, PhasePoly], states: np.ndarray) -> dict[str, DriftRecord]:
    out = {}
    for name, poly in integrals.items():
        values = evaluate_many(poly, states)
        dev = float(np.max(np.abs(values - values[0])))
        out[name] = DriftRecord(float(values[0]), dev, dev / max(1.0, abs(float(values[0]))))
    return out


def closure_error(params: SystemParams, integrals: IntegralSet | None, initial: PhasePoint, method: str, dt: float):
    """Per-component |state(T) - state(0)| at the common period T = 2 pi / omega."""
    T = params.period
    if method == "closed_form":
        end = closed_form_state(params, initial, T)
    else:
        steps = max(1, round(T / dt))
        H = integrals.H if integrals is not None else None
        if H is None:
            from .model import build_system

            H = build_system(params).H
        _, states = integrate_rk4(H, initial, T / steps, steps, sample_every=steps)
        end = states[-1]
    return [abs(float(a) - float(b)) for a, b in zip(end, initial)]


def conservation_drift(params: SystemParams, integrals: IntegralSet, spec: TrajectorySpec) -> DriftReport:
    traj = generate(params, integrals, spec)
    records = drift_records(integrals.conserved, traj.states)
    closure = closure_error(params, integrals, spec.initial, spec.method, spec.dt)
    return DriftReport(spec.method, len(traj.times), records, max(closure), params.period, closure)


# ---------------------------------------------------------------------------
# functional independence
# ---------------------------------------------------------------------------

def jacobian(polys: Sequence[PhasePoly], point: PhasePoint) -> list[list[QwScalar]]:
    return [[evaluate(partial_derivative(p, v), point) for v in VARIABLES] for p in polys]


def independence_rank(polys: Sequence[PhasePoly], point: PhasePoint) -> int:
    """Exact rank of the Jacobian of ``polys`` at a rational phase point."""
    if not all(isinstance(v, (int, Fraction)) for v in point):
        raise TypeError("independence_rank needs an exact rational point")
    return bareiss_rank(jacobian(polys, point))


def random_rational_point(rng: random.Random) -> tuple[Fraction, ...]:
    """Numerators in [-9, 9], denominators in {1, 2, 3}."""
    return tuple(Fraction(rng.randint(-9, 9), rng.choice((1, 2, 3))) for _ in range(6))


def rank_survey(polys: Sequence[PhasePoly], seed: int, count: int) -> list[int]:
    rng = random.Random(seed)
    return [independence_rank(polys, random_rational_point(rng)) for _ in range(count)]


def five_integrals(integrals: IntegralSet) -> list[PhasePoly]:
    return [integrals.X0, integrals.X1, integrals.X2, integrals.X3, integrals.X4_reduced]
