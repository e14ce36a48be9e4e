"""Trace norm of the discretized resolvent difference against t.

Prints the norms, the local log-log slopes and the fit over t = 4..64. The
local slopes tend to -3/2; a bound state close to -t makes the small-t
end steeper.
"""

import numpy as np

from specdet import EdgePotentials, PotentialProfile, preset
from specdet.resolvent import trace_norm_decay

Z = PotentialProfile.zero()
CASES = {
    "shallow_well/kirchhoff": (EdgePotentials(PotentialProfile.square_well(-1, 1), Z), preset("kirchhoff")),
    "square_well/kirchhoff": (EdgePotentials(PotentialProfile.square_well(-4, 1), Z), preset("kirchhoff")),
    "repulsive_well/kirchhoff": (EdgePotentials(PotentialProfile.square_well(4, 1), Z), preset("kirchhoff")),
    "exponential/delta(-1)": (
        EdgePotentials(PotentialProfile.exponential(-1, 1), PotentialProfile.exponential(-1, 1)),
        preset("delta", -1),
    ),
}
TS = [4, 8, 16, 32, 64, 128, 256]

for name, (pots, m) in CASES.items():
    fit = trace_norm_decay(pots, m, TS, h=0.01, X=8.0)
    local = np.diff(np.log(fit.norms)) / np.diff(np.log(fit.t))
    head = np.polyfit(np.log(fit.t[:5]), np.log(fit.norms[:5]), 1)[0]
    print(name)
    print("  norms ", " ".join(f"{v:.3e}" for v in fit.norms))
    print("  local ", " ".join(f"{v:.3f}" for v in local))
    print(f"  fit over t=4..64: {head:.3f}")
