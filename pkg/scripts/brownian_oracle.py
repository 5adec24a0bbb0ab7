#!/usr/bin/env python3
"""High-precision reference values for the Wiener sup-norm CDF.

Evaluates P(sup_{0<=s<=1} |W(s)| <= x) with mpmath at 40 digits, both from
the alternating theta series directly and from mpmath's jtheta (the series
is (theta_1'(0)-free) expressible via jtheta(3, ...) differences on the
imaginary axis; here we simply sum to convergence at high precision).

Frozen into tests/test_brownian.py.
"""

import mpmath as mp

mp.mp.dps = 40


def sup_cdf_mp(x):
    q = mp.pi ** 2 / (8 * x ** 2)
    total = mp.mpf(0)
    k = 0
    while True:
        term = mp.mpf(-1) ** k / (2 * k + 1) * mp.exp(-q * (2 * k + 1) ** 2)
        total += term
        if abs(term) < mp.mpf(10) ** -38:
            break
        k += 1
    return 4 / mp.pi * total


def main():
    for x in ("0.3", "0.5", "1", "1.5", "2", "3"):
        v = sup_cdf_mp(mp.mpf(x))
        print(f"x={x:4s} sup_cdf={mp.nstr(v, 25)}")
    # ratio to the leading asymptotic form at x = 0.3
    x = mp.mpf("0.3")
    lead = 4 / mp.pi * mp.exp(-mp.pi ** 2 / (8 * x ** 2))
    print("x=0.3 ratio to leading form:", mp.nstr(sup_cdf_mp(x) / lead, 25))


if __name__ == "__main__":
    main()
