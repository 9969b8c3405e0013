"""Growth conditions and index bounds for the builtin families.

Run:  python demos/growth_and_indices.py
"""

import math

from orlicz_kit import (
    ExpMinusOne,
    LogPerturbedPower,
    MaxPowers,
    MinPowers,
    Regime,
    ToleranceConfig,
    delta2_equivalence_suite,
    delta_q_best_constant,
    estimate_indices,
)


def main():
    print("chord exponents bracket the indices")
    for f in (MaxPowers(0.5, 2), MinPowers(1, 2), MaxPowers(2, 3)):
        idx = estimate_indices(f)
        print(f"  {f.to_spec()}: chord_min={idx.chord_min:.6f} chord_max={idx.chord_max:.6f}")

    print("\nu**2/|ln u| near zero: order 2 never settles, order 2.1 does")
    f, small = LogPerturbedPower(2.0), Regime.small(1 / math.e)
    for lo in (1e-4, 1e-6, 1e-8):
        tol = ToleranceConfig(grid_span=(lo, 1e8))
        k2 = delta_q_best_constant(f, 2.0, small, tol).constant
        k21 = delta_q_best_constant(f, 2.1, small, tol).constant
        print(f"  grid from {lo:.0e}: K(2) = {k2:8.3f}   K(2.1) = {k21:.4f}")

    print("\ndoubling, power growth and a finite upper chord exponent agree")
    for f, regime in ((MaxPowers(1, 3), Regime.all()), (ExpMinusOne(), Regime.large(1.0))):
        suite = delta2_equivalence_suite(f, regime)
        print(f"  {f.to_spec()} on {regime}: verdicts {suite.verdicts}")


if __name__ == "__main__":
    main()
