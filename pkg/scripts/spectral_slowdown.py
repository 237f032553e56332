#!/usr/bin/env python3
"""nN-averages do not settle under rotations drawn from spectral level sets.

Builds the Cantor-like level sets for eps = 1/10, draws a rational angle u*
from the depth-2 intersection, and evaluates || (1/N) sum_n T^{nN} f ||_2
exactly for f a centered arc indicator at N = N_1, N_2.  The norm stays above
(1 - 2 pi eps) ||f||, far from the zero limit a mixing system would give.
"""

import math
from fractions import Fraction

from ergoarrays.averages import ArraySpec, Observable, l2_distance_exact
from ergoarrays.mixing import spectral_levels, verify_spectral_bound
from ergoarrays.systems import CircleRotation


def main() -> None:
    eps = Fraction(1, 10)
    c = spectral_levels(eps, 2)
    print(f"levels: N_k = {list(c.Ns)}, eps_k = {[str(e) for e in c.eps_ks]}")
    for k in (1, 2):
        rep = verify_spectral_bound(c, k, 200)
        print(f"depth {k}: max dist(u n N_k, Z) = {rep.max_deviation} <= {eps}")

    u_star = next(u for u in c.sample_points(2, 9) if u != 0)
    print(f"\nrotation angle u* = {u_star}")
    rot = CircleRotation(u_star)
    f = Observable.indicator(rot.arc(0, Fraction(1, 4)))
    spec = ArraySpec.create(rot, [f], ["n*N"], center=True)
    f_norm = math.sqrt(3 / 16)
    floor = (1 - 2 * math.pi * float(eps)) * f_norm
    for k in (1, 2):
        N = c.Ns[k]
        dist_sq = l2_distance_exact(spec, N, target=0)
        print(
            f"N = N_{k} = {N:6d}:  ||A_N||_2 = {math.sqrt(float(dist_sq)):.6f}"
            f"  (lower bound {floor:.6f}, ||f||_2 = {f_norm:.6f})"
        )


if __name__ == "__main__":
    main()
