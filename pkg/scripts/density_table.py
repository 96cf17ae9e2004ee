#!/usr/bin/env python3
"""Print density-certificate tables for the generated curvature-field algebra.

For each (c, lambda) pair the generated rank per degree is compared with the
dimension of the full polynomial vector-field module on S^{n-1}.
"""

import argparse
from fractions import Fraction

from finslerhol.holonomy import density_certificate
from finslerhol.spherefield import ModelParams

DEFAULT_PAIRS = ["1/2,-1/4", "1,1", "2,-3"]

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=3, help="sphere ambient dimension")
    parser.add_argument("--p-max", type=int, default=4, help="largest degree to certify")
    parser.add_argument(
        "--pairs",
        nargs="+",
        default=DEFAULT_PAIRS,
        help="c,lambda pairs as exact rationals, e.g. 1/2,-1/4",
    )
    args = parser.parse_args()

    failures = 0
    for pair in args.pairs:
        c_str, lam_str = pair.split(",")
        params = ModelParams(args.n, Fraction(c_str), Fraction(lam_str))
        cert = density_certificate(params, p_max=args.p_max)
        print(f"\nn={args.n}, c={params.c}, lambda={params.lam}, p <= {args.p_max}")
        print(cert.table())
        if cert.degenerate:
            print("  (degenerate: flat curvature generates nothing)")
        if not cert.passed:
            failures += 1
            if cert.witness:
                print(f"  witness: {cert.witness}")
    raise SystemExit(1 if failures else 0)
