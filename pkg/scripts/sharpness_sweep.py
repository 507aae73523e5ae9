"""Certify the extremal configurations and print how tight the bound is.

    python scripts/sharpness_sweep.py --max-n 20
"""

import argparse
import math
import time

from plankzone.geom_core import extremal_configuration, gram
from plankzone.witness import build_M, certify_zone_bound, check_M_bounds, zone_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=16)
    args = ap.parse_args()
    print(f"{'n':>3} {'margin':>12} {'bound':>12} {'gap':>10} {'max m_kk':>10} {'limit':>10} {'sec':>6}")
    for n in range(2, args.max_n + 1):
        vs = extremal_configuration(n)
        t0 = time.perf_counter()
        r = certify_zone_bound(vs)
        rep = check_M_bounds(build_M(gram(vs), r.w))
        dt = time.perf_counter() - t0
        limit = 1 / (n * math.sin(math.pi / (2 * n)) ** 2)
        print(f"{n:3d} {r.min_margin:12.9f} {zone_bound(n):12.9f} {r.min_margin - zone_bound(n):10.1e} "
              f"{rep.diag_max:10.6f} {limit:10.6f} {dt:6.3f}")


if __name__ == "__main__":
    main()
