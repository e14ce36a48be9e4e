"""Grid refinement of the finite-element oracle.

For each configuration the lowest eigenvalue and the resolvent trace at
t = 4 are computed on h = 0.04, 0.02, 0.01, 0.005; successive-difference
ratios near 4 confirm second order, and the Richardson values are compared
with the determinant zero and the analytic trace.
"""

import math

from specdet import EdgePotentials, PotentialProfile, find_eigenvalues, preset, trace_formula_rhs
from specdet.resolvent import discretize, richardson, trace_difference

Z = PotentialProfile.zero()
CASES = {
    "square_well/kirchhoff": (EdgePotentials(PotentialProfile.square_well(-4, 1), Z), preset("kirchhoff")),
    "exponential/density(0.5)": (EdgePotentials(PotentialProfile.exponential(-2, 1), Z), preset("density", 0.5)),
    "square_well/delta_prime(2)": (EdgePotentials(PotentialProfile.square_well(-3, 1), Z), preset("delta_prime", 2.0)),
}
HS = (0.04, 0.02, 0.01, 0.005)
T = 4.0


def ratios(v):
    return [(v[i] - v[i + 1]) / (v[i + 1] - v[i + 2]) for i in range(len(v) - 2)]


for name, (pots, m) in CASES.items():
    lam = [discretize(pots, m, h, 20.0).eigenvalues()[0] for h in HS]
    tr = [trace_difference(pots, m, T, h, 30.0) for h in HS]
    zeros = find_eigenvalues(pots, m)
    exact = zeros[0].energy if zeros else float("nan")
    rhs = trace_formula_rhs(pots, m, 1j * math.sqrt(T)).real
    print(name)
    print("  lowest eigenvalue  ", " ".join(f"{v:.8f}" for v in lam))
    print("  ratios             ", " ".join(f"{r:.3f}" for r in ratios(lam)))
    print(f"  richardson {richardson(lam[-2:]):.10f}   determinant zero {exact:.10f}")
    print("  trace at t=4       ", " ".join(f"{v:.8f}" for v in tr))
    print("  ratios             ", " ".join(f"{r:.3f}" for r in ratios(tr)))
    print(f"  richardson {richardson(tr[-2:]):.10f}   analytic {rhs:.10f}")
