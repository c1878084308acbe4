#!/usr/bin/env python3
"""Track convergence of the cascade fixed-point iterates F_k to 1/(1+z).

For each k, reports the sup-norm gap to the fixed point and the envelope
constant, as JSON lines; optionally cross-checks one k against sampled
cascade sums.
"""

import argparse
import json

import numpy as np

from pathscape import cascade, recursion


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=12)
    ap.add_argument("--zmax", type=float, default=10.0)
    ap.add_argument("--grid", type=int, default=2**14)
    ap.add_argument("--mc-k", type=int, default=None, help="also KS-check this k")
    ap.add_argument("--samples", type=int, default=5000)
    ap.add_argument("--delta", type=float, default=1e-6)
    ap.add_argument("--seed", type=int, default=20260823)
    args = ap.parse_args()

    for k in range(args.kmax + 1):
        gf = recursion.fk_iterate(k, args.zmax, args.grid)
        sup = float(np.abs(gf.values - 1.0 / (1.0 + gf.xs)).max())
        print(json.dumps({"k": k, "sup_gap_to_limit": sup, "halving": sup * 2**k}))

    if args.mc_k is not None:
        rep = cascade.cascade_limit_check(
            args.mc_k, args.delta, args.samples, args.seed
        )
        print(
            json.dumps(
                {
                    "mc_k": rep.generations,
                    "ks_vs_exponential": rep.ks,
                    "finite_k_gap_bound": rep.finite_k_gap_bound,
                    "mean_bias": rep.mean_bias,
                }
            )
        )


if __name__ == "__main__":
    main()
