"""The coupling below which bound states dissolve, versus quasi-momentum.

The continuum bands are computed for an infinite ring at each pair angle and
g is bisected until the gap hosting a bound branch just opens.  At zero
quasi-momentum the answer is sqrt(3); at pi there is always a gap.
"""

import math

import numpy as np

from jchbound import critical_coupling_branches


def main():
    print("  P_angle/pi   lower branch   upper branch")
    for angle in np.linspace(0, 2 * math.pi, 17):
        cc = critical_coupling_branches(angle)
        print(f"  {angle / math.pi:9.4f}   {cc.lower:12.8f}   {cc.upper:12.8f}")
    print(f"\nsqrt(3) = {math.sqrt(3):.8f}")


if __name__ == "__main__":
    main()
