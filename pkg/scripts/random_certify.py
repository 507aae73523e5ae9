"""Certify many random instances and summarize how far above the bound they land.

    python scripts/random_certify.py --count 2000 --max-n 10 --seed 1
"""

import argparse
import collections
import time

import numpy as np

from plankzone.instances import random_instance
from plankzone.witness import certify_zone_bound, zone_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--max-n", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    ratios = collections.defaultdict(list)
    paths = collections.Counter()
    t0 = time.perf_counter()
    for _ in range(args.count):
        vs = random_instance(rng, n_max=args.max_n)
        r = certify_zone_bound(vs)
        ratios[vs.n].append(r.min_margin / zone_bound(vs.n))
        paths[r.path] += 1
    print(f"{args.count} instances in {time.perf_counter() - t0:.1f} s, routes {dict(paths)}")
    print(f"{'n':>3} {'count':>6} {'min ratio':>10} {'median':>8}")
    for n in sorted(ratios):
        x = np.array(ratios[n])
        print(f"{n:3d} {len(x):6d} {x.min():10.6f} {np.median(x):8.4f}")


if __name__ == "__main__":
    main()
