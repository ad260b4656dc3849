"""Pure-Python reference kernels. Same contract as the compiled ``_kernels``.

Term maps are ``{packed_monomial: int}``; a packed monomial stores one
exponent per byte, ``x`` in the lowest byte and ``p3`` in the sixth, so
adding two keys multiplies the monomials as long as no byte overflows.
"""
from __future__ import annotations


def mul_terms(lhs: dict, rhs: dict) -> dict:
    """Sparse product of two integer term maps, zero entries dropped."""
    if len(lhs) > len(rhs):
        lhs, rhs = rhs, lhs
    out: dict = {}
    get = out.get
    ritems = list(rhs.items())
    for k1, c1 in lhs.items():
        for k2, c2 in ritems:
            k = k1 + k2
            out[k] = get(k, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def eval_float(keys, coeffs, point) -> float:
    """Evaluate ``sum(c * monomial(point))`` in double precision."""
    powers = []
    for i in range(6):
        top = 0
        for k in keys:
            e = (k >> (8 * i)) & 0xFF
            if e > top:
                top = e
        v = float(point[i])
        row = [1.0] * (top + 1)
        for e in range(1, top + 1):
            row[e] = row[e - 1] * v
        powers.append(row)
    px, py, pz, pp1, pp2, pp3 = powers
    total = 0.0
    for k, c in zip(keys, coeffs):
        total += (
            c
            * px[k & 0xFF]
            * py[(k >> 8) & 0xFF]
            * pz[(k >> 16) & 0xFF]
            * pp1[(k >> 24) & 0xFF]
            * pp2[(k >> 32) & 0xFF]
            * pp3[(k >> 40) & 0xFF]
        )
    return total
