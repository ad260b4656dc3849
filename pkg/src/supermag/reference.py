"""Hand-expanded reference form of the reduced fifth integral for m = 3, n = 2.

Written in angular momenta ``l1 = y p3 - z p2``, ``l2 = z p1 - x p3``,
``l3 = x p2 - y p1`` for the leading part, with ``tau = 6 w`` (so
``tau**2 = 9 W1**2 + 4 W2**2``). Used as an independent golden value for the
order reduction; it is not built from any of the constructions in ``model``.
"""
from __future__ import annotations

from fractions import Fraction as F

from .model import ParameterError, SystemParams
from .phasepoly import PhasePoly


def reference_x4_m3n2(params: SystemParams) -> tuple[PhasePoly, PhasePoly]:
    """Return ``(leading, lower)``: the momentum-degree-4 part and the rest."""
    if (params.m, params.n) != (3, 2):
        raise ParameterError("the reference form exists only for m=3, n=2")
    x, y, z, p1, p2, p3 = PhasePoly.variables(params.rho)
    W1, W2 = params.omega1_field, params.omega2_field
    tau = params.omega * 6
    t3 = tau**3
    l1 = y * p3 - z * p2
    l2 = z * p1 - x * p3
    l3 = x * p2 - y * p1

    leading = (
        l2 * p2**2 * p3 * (16 * W2**3 / (9 * W1) + 4 * W1 * W2)
        - (l2 * p3 * 3 + l3 * p2 * 8) * p3**2 * (4 * W1 * W2)
        - (l1 * p3 + l3 * p1) * p2**2 * (4 * W2**2 + 9 * W1**2)
        + (l1 * p3 + l3 * p1) * p3**2 * (27 * W1**2)
    ).scale(tau.inverse())

    cubic_p3 = (
        (x**2 - y**2 / 3 - z**2) * (27 * W1**3)
        - x * y * (36 * W1**2 * W2)
        + (3 * x**2 + 4 * y**2 - 3 * z**2) * (4 * W2**2 * W1)
        - x * y * (F(64, 9) * W2**3)
    )
    quad_p3 = (
        (x**2 * F(9, 4) + 2 * y**2 - z**2) * W1**2
        + (x**2 - y**2 / 3 - z**2) * (F(4, 9) * W2**2)
        + x * y * (F(16, 81) * W2**3 / W1)
    )
    lower = (
        (y**2 * p1**2 * p3 * (2 * W1)
         - (x * (3 * W1) + y * (F(8, 9) * W2)) * y * p1 * p2 * p3 * 2
         - y * z * p1 * p3**2 * (F(8, 9) * W2)
         + ((9 * x**2 + y**2 - z**2) * (W1 / 2) + x * y * (2 * W2)
            + (x**2 - z**2) * (F(2, 9) * W2**2 / W1)) * p2**2 * p3
         - y * z * p2 * p3**2 * (2 * W1)
         - quad_p3 * y * p3**2).scale(tau)
        - (cubic_p3 * p3**3).scale(tau.inverse() / 2)
        + (-y**3 * p1**2 / 27
           + x * y**2 * p1 * p2 / 3
           + y**2 * z * p1 * p3 * (4 * W2 / (81 * W1))
           - x**2 * y * p2**2 / 4
           + y**2 * z * p2 * p3 / 9
           + ((y * W1 - x * (F(2, 3) * W2)) ** 2 - z**2 * (W1**2 + F(4, 9) * W2**2))
           * y**2 * p3 * (1 / (18 * W1))).scale(t3)
        + (y**3 * x**2).scale(tau**5 / 108)
    )
    return leading, lower
