"""The secular function G(lambda) and where its zeros fall.

Eigenvalues of a sector are roots of G.  Inside the bands G has a pole
between every pair of neighbouring roots; inside the gaps the only roots are
the bound states.  This prints a coarse trace of G together with the bands
for N = 50, P = 15, g/J = 2.
"""

import numpy as np

from jchbound import ModelParams, band_intervals, find_bound_eigenvalues
from jchbound.secular import SecularFunction

params = ModelParams(50, 0.0, 1.0, 2.0)
P = 15


def main():
    bands = band_intervals(params, P)
    print("bands:")
    for lo, hi in bands.intervals:
        print(f"  [{lo:+.4f}, {hi:+.4f}]")
    print("bound-state roots of G:")
    for rec in find_bound_eigenvalues(params, P, bands):
        print(f"  {rec.lambda_b:+.10f}  ({rec.branch}, {rec.margin:.4f} from the nearest edge)")

    sf = SecularFunction(params, P)
    print("\n  lambda        G")
    for lam in np.linspace(-7, 7, 29):
        if sf.pole_distance(lam) < 1e-6:
            continue
        where = "gap" if bands.gap_of(lam) else ""
        print(f"  {lam:+6.2f}  {sf(lam):+12.5f}  {where}".rstrip())


if __name__ == "__main__":
    main()
