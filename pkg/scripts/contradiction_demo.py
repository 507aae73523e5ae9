"""Show how an oversized diagonal entry of M is refuted on its shrunken slice.

For each n, builds M with M1 = 1 and m_kk above csc^2(pi/2n)/n, then prints
the root count of T - cos(n theta) and the point b with prod|(Mb)_j| > 1.

    python scripts/contradiction_demo.py --seed 3
"""

import argparse

import numpy as np

from plankzone import trigpoly
from plankzone.instances import oversized_M
from plankzone.witness import diag_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 3, 4, 5, 6])
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"{'n':>3} {'m_kk/limit':>10} {'alpha':>8} {'roots':>5} {'theta':>8} {'|T|':>8} {'prod':>8}")
    for n in args.sizes:
        M, k = oversized_M(rng, n)
        sl = trigpoly.alpha_slice(M, k)
        dec = trigpoly.q_decompose(trigpoly.to_fourier(sl.poly), n)
        roots = trigpoly.count_roots(dec.Q).count
        c = trigpoly.contradiction_search(M, k)
        print(f"{n:3d} {M[k, k] / diag_threshold(n):10.4f} {sl.alpha:8.4f} {roots:5d} "
              f"{c.theta:8.4f} {c.T_value:8.4f} {c.product:8.4f}")


if __name__ == "__main__":
    main()
