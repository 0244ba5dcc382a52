"""Velling's hyperbolic average for Q = 6 against the WP norm, as j_max grows."""

import math

from velling_lab.series import TruncatedSeries
from velling_lab.transport import velling_average_extrapolated

SIX = TruncatedSeries.constant(6, 0)


def main():
    wp = 3 * math.pi
    for J in (8, 16, 32, 64, 128, 256):
        value, _ = velling_average_extrapolated(SIX, J, radii=(0.999, 0.9999))
        # truncated sum for Q = 6 in closed form
        exact = 3 * math.pi * (1 - 4 * (2 * J + 1) / (6 * J * (J + 1)))
        print(f"J={J:<4} average {value:.8f}  truncated closed form {exact:.8f}  gap to WP {(value - wp) / wp:+.3%}")


if __name__ == "__main__":
    main()
