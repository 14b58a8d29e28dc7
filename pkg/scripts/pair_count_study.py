#!/usr/bin/env python3
"""Exact lattice pair counts against the two flat-box estimates as N grows."""
import argparse
import math
import warnings

import numpy as np

from bosonrpa import build_fermi_ball, count_pairs_exact, partition_sphere
from bosonrpa.patches import patch_membership


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-patches", type=int, default=20)
    ap.add_argument("--corridor", type=float, default=1.0)
    ap.add_argument("--n-values", default="1000,10000,100000,1000000")
    args = ap.parse_args()
    k = np.array([0, 0, 1])
    print("N, k_F, exact, 4 pi N^(2/3)/M |k.w|, 4 pi k_F^2/M |k.w|")
    for n in (int(x) for x in args.n_values.split(",")):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ball = build_fermi_ball(n_particles=n)
        ps = partition_sphere(args.m_patches, args.corridor, radius=ball.k_fermi)
        alpha = int(np.argmax(ps.centers @ k))
        dot = float(ps.centers[alpha] @ k)
        member = patch_membership(ps, alpha, ball.k_fermi, max(args.corridor, 1.0))
        exact = count_pairs_exact(ball, member, k)
        lit = 4 * math.pi * ball.n_particles ** (2 / 3) / args.m_patches * dot
        fer = 4 * math.pi * ball.k_fermi**2 / args.m_patches * dot
        print(f"{ball.n_particles}, {ball.k_fermi:.4f}, {exact}, {lit:.2f}, {fer:.2f}")


if __name__ == "__main__":
    main()
