#!/usr/bin/env python3
"""Sweep the open-path existence probability across dimensions.

Reports p_star(L), the normalized ratio p_star * L / ln L (which tends
to 1), and the closed-form upper bound, as JSON lines.
"""

import argparse
import json
import math
import time

from pathscape import moments, recursion


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--dims", type=int, nargs="+", default=[10, 100, 1000, 10_000]
    )
    ap.add_argument("--grid", type=int, default=2**14)
    args = ap.parse_args()

    for L in args.dims:
        t0 = time.perf_counter()
        ps = recursion.p_star(L, args.grid)
        print(
            json.dumps(
                {
                    "L": L,
                    "grid": args.grid,
                    "p_star": ps,
                    "ratio_to_logL_over_L": ps * L / math.log(L),
                    "upper_bound": moments.pstar_upper_bound(L),
                    "seconds": round(time.perf_counter() - t0, 2),
                }
            )
        )


if __name__ == "__main__":
    main()
