"""Second variation of spherical area along the Bers family t Q, for a few step sizes.

Each row compares the central second difference (with one Richardson step) to
2 pi ||Q||_S^2.
"""

import argparse
import math

from velling_lab.diskquad import make_disk_grid
from velling_lab.metrics import second_variation_family, velling_norm_S
from velling_lab.schwarzian import QuadDifferential


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bers", default="1.0", help="comma-separated a_2, a_3, ... (real)")
    ap.add_argument("--order", type=int, default=64)
    args = ap.parse_args()

    Q = QuadDifferential.from_bers_list([float(x) for x in args.bers.split(",")])
    grid = make_disk_grid(64, 256)
    ref = 2 * math.pi * velling_norm_S(Q)
    print(f"2 pi ||Q||_S^2 = {ref:.12f}")
    for h in (4e-2, 2e-2, 1e-2, 5e-3):
        sv = second_variation_family(Q.to_series(), grid, h, order=args.order)
        print(f"h={h:<6g} second variation {sv.value:.12f}  rel err {abs(sv.value - ref) / ref:.2e}  first diff {sv.first_difference:.1e}")


if __name__ == "__main__":
    main()
