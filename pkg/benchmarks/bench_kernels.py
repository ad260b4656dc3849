"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the two hot paths on realistic inputs: the sparse product of the two
degree-7 integrals for (m, n) = (5, 2), and the float evaluator driving one RK4
period. Both backends are called directly, so no environment switch is needed.
"""
from __future__ import annotations

import argparse
import timeit
from fractions import Fraction

from supermag import _kernels_py
from supermag.dynamics import HamiltonianFlow
from supermag.model import build_integrals, derive_params

try:
    from supermag import _kernels as compiled
except ImportError:
    compiled = None


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    I = build_integrals(derive_params(2, Fraction(1, 3), 5, 2))
    # integer numerator maps, as stored inside PhasePoly
    lhs = I.X4_raw._a or I.X4_raw._b
    rhs = I.X5._a or I.X5._b
    keys, coeffs = I.X5.float_coefficients()
    flow = HamiltonianFlow(I.H)
    comps = flow._components
    point = [0.3, -0.7, 1.1, 0.4, 0.9, 0.5]

    cases = {
        f"mul_terms ({len(lhs)} x {len(rhs)} terms)": lambda k: k.mul_terms(lhs, rhs),
        f"eval_float X5 ({len(keys)} terms) x 1000": lambda k: [k.eval_float(keys, coeffs, point) for _ in range(1000)],
        "vector field x 4000 (one RK4 period at T/1000)":
            lambda k: [k.eval_float(ks, cs, point) for _ in range(4000) for ks, cs in comps],
    }
    backends = [("python", _kernels_py)] + ([("cython", compiled)] if compiled else [])
    print(f"{'case':<48}" + "".join(f"{name:>12}" for name, _ in backends) + "     speedup")
    for label, fn in cases.items():
        times = [min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) for _, mod in backends]
        speed = f"{times[0] / times[1]:10.1f}x" if len(times) == 2 else "         -"
        print(f"{label:<48}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed)
    if compiled is None:
        print("compiled extension not built; only the pure-Python backend was timed")


if __name__ == "__main__":
    main()
