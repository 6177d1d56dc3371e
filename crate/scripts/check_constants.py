#!/usr/bin/env python3
"""Independent high-precision check of the closed-form constants.

Recomputes, with mpmath at 60 decimal digits:

  * prefix exponent      A(n) = floor(9 * n^3 * sqrt(n * ln n))
  * unity order bound    U(n) = floor(exp(sqrt(6 * n * ln n)))

and prints them as JSON keyed by n.  The library computes the same values
with exact interval arithmetic; the test suite diffs the two sources so a
bug in either implementation surfaces as a disagreement.

Usage: check_constants.py [n ...]    (default: 2..12)
"""

import json
import sys

import mpmath

mpmath.mp.dps = 60

# Refuse to answer when the value sits suspiciously close to an integer:
# the floor would then hinge on digits beyond our precision.
GUARD = mpmath.mpf("1e-40")


def safe_floor(x):
    f = mpmath.floor(x)
    if x - f < GUARD or (f + 1) - x < GUARD:
        raise SystemExit(f"value {x} is too close to an integer to floor safely")
    return int(f)


def a_of_n(n):
    return safe_floor(9 * n**3 * mpmath.sqrt(n * mpmath.ln(n)))


def unity_order_bound(n):
    return safe_floor(mpmath.exp(mpmath.sqrt(6 * n * mpmath.ln(n))))


def main(argv):
    ns = [int(a) for a in argv[1:]] or list(range(2, 13))
    if any(n < 2 for n in ns):
        raise SystemExit("n must be at least 2")
    out = {
        "a_of_n": {str(n): a_of_n(n) for n in ns},
        "unity_order_bound": {str(n): unity_order_bound(n) for n in ns},
    }
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main(sys.argv)
