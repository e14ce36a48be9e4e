"""Levinson bookkeeping for a fixed set of edge potentials and junctions.

Prints N_V, N_0, the zero-energy case, eta(inf) - eta(0) and the integer
prediction for each configuration. Pass --json to dump the full reports.
"""

import argparse
import json
import math
import time

from specdet import EdgePotentials, PotentialProfile, levinson_check, preset, tune_resonance

Z = PotentialProfile.zero()
SW = PotentialProfile.square_well
EXP = PotentialProfile.exponential

CASES = {
    "square_well/kirchhoff": (EdgePotentials(SW(-4, 1), Z), preset("kirchhoff")),
    "shallow_well/kirchhoff": (EdgePotentials(SW(-1, 1), Z), preset("kirchhoff")),
    "free/delta(2)": (EdgePotentials.free(), preset("delta", 2)),
    "free/delta(-2)": (EdgePotentials.free(), preset("delta", -2)),
    "two_wells/delta(-1)": (EdgePotentials(SW(-6, 1), SW(-3, 1.5)), preset("delta", -1)),
    "exponential/delta_prime(3)": (EdgePotentials(EXP(-3, 1), EXP(-2, 1.5)), preset("delta_prime", 3)),
    "resonant_well/kirchhoff": (EdgePotentials(tune_resonance(), Z), preset("kirchhoff")),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--only", nargs="*", default=None, help="subset of case names")
    args = ap.parse_args()
    names = args.only or list(CASES)
    print(f"{'case':30s} {'N_V':>3s} {'N_0':>3s} {'case':>4s} {'lhs/pi':>8s} {'rhs/pi':>8s} {'resid/pi':>9s} {'sec':>6s}")
    reports = {}
    for name in names:
        t0 = time.perf_counter()
        rep = levinson_check(*CASES[name])
        dt = time.perf_counter() - t0
        rhs = rep.levinson_rhs
        print(
            f"{name:30s} {rep.N_V:3d} {rep.N_0:3d} {rep.constants.case:>4s} {rep.levinson_lhs / math.pi:8.4f} "
            f"{(rhs / math.pi if rhs is not None else float('nan')):8.4f} "
            f"{(rep.residual / math.pi if rep.residual is not None else float('nan')):9.2e} {dt:6.1f}"
        )
        reports[name] = rep.to_dict()
    if args.json:
        print(json.dumps(reports, indent=2, sort_keys=True, default=str))


if __name__ == "__main__":
    main()
