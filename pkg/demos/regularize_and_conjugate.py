"""Envelope regularization and the Young conjugate.

Run:  python demos/regularize_and_conjugate.py
"""

import numpy as np

from orlicz_kit import (
    MaxPowers,
    MinPowers,
    biconjugate,
    duality_transfer_check,
    regularize_concave_power,
    regularize_convex_power,
    young_conjugate,
)
from orlicz_kit.conjugation import power_table


def main():
    res = regularize_concave_power(MaxPowers(1, 2), 2.0)
    rep = res.report
    print("max(u, u**2) regularized with q = 2")
    print(f"  psi(u**(1/2)) concave: {rep.shape.holds}")
    print(f"  lower bound ratio {rep.lower_bound_ratio:.4f}, upper bound ratio {rep.upper_bound_ratio:.4f}")

    res = regularize_convex_power(MinPowers(1, 2), 1.0)
    print("min(u, u**2) regularized with p = 1")
    print(f"  psi convex: {res.report.shape.holds}, bounds hold: {res.report.ok}")

    print("\nconjugate of u**3/3 against v**1.5/1.5")
    c = young_conjugate(power_table(3.0))
    v = np.array([0.1, 1.0, 10.0])
    for vi, ci in zip(v, c.at(v)):
        print(f"  v = {vi:5.1f}: computed {ci:.10f}, closed form {vi ** 1.5 / 1.5:.10f}")

    b = biconjugate(MinPowers(1, 2))
    print(f"\nbiconjugate of min(u, u**2) is a minorant: {b.minorant_holds} (excess {b.excess:.1e})")

    for p in (1.5, 2.0, 3.0):
        d = duality_transfer_check(power_table(p), p)
        print(f"  lower growth {p} vs dual upper growth {d.q:.3f}: {d.primal.holds}/{d.dual.holds}")


if __name__ == "__main__":
    main()
