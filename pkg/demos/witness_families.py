"""Finite families that refute estimates, type and cotype.

Run:  python demos/witness_families.py
"""

import numpy as np

from orlicz_kit import (
    ExpMinusOne,
    MaxPowers,
    Power,
    StepFunction,
    build_linfty_witness,
    build_lower_estimate_witness,
    build_type_failure_witness,
    luxemburg_norm,
)
from orlicz_kit.geometry import probe_ratio


def main():
    print("lower 1-estimate fails for u**2")
    for n in (2, 4, 8):
        w = build_lower_estimate_witness(Power(2), 1.0, n)
        print(f"  n={n}: {w.size} vectors, sum of norms {w.power_sum(1):.3f}, norm of sum {w.sum_norm:.3e}")

    print("\ntype 2 fails for u")
    for n in (1, 3, 5):
        w = build_type_failure_witness(Power(1), 2.0, 1.0, n)
        print(f"  n={n}: type-2 ratio {probe_ratio(Power(1), 'type', 2.0, w):.1f}")

    print("\ncotype 1.5 ratio of max(u, u**2) along blocks")
    f = MaxPowers(1, 2)
    for n in (4, 8, 12):
        w = build_lower_estimate_witness(f, 1.5, n)
        print(f"  n={n}: {probe_ratio(f, 'cotype', 1.5, w):.1f}")

    print("\nalmost isometric l_inf^4 inside the exp(u) - 1 space")
    g = ExpMinusOne()
    w = build_linfty_witness(g, 4)
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(20):
        x = rng.uniform(-1, 1, 4)
        s = StepFunction(w.space, sum(xi * v.coeffs for xi, v in zip(x, w.vectors)))
        worst = max(worst, abs(luxemburg_norm(g, s) - np.max(np.abs(x))))
    print(f"  delta = {w.meta['delta']:.4f}, worst deviation over 20 samples {worst:.4f}")


if __name__ == "__main__":
    main()
