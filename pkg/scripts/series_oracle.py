#!/usr/bin/env python3
"""High-precision reference values for the weighted small-deviation series.

Computes

    normalized(lam; r, a, tau)
        = lam^(a+1) * sum_{n>=1} n^(r-2) (log n)^a P(sup_{0<=s<=1}|W(s)| <= x_n)

with x_n = sqrt(pi^2 / (8 log n)) * (eps + tau/log n), eps = (r-1+lam)^(-1/2),
and the convention log n = ln(max(n, e)).

Method: swap the order of summation between n and the alternating theta index
k (both sums converge absolutely).  Each inner n-sum is evaluated by direct
summation up to N = 10^5 plus an explicit Euler-Maclaurin closure

    sum_{n>=N} f(n) = int_N^inf f + f(N)/2 - f'(N)/12 + f'''(N)/720 - ...

where the integral is done in y = log x coordinates with mpmath quadrature.
For tau = 0, r = 2 the inner sums have Riemann-zeta closed forms, which
cross-check the Euler-Maclaurin route to ~1e-18 relative.

This script is independent of the library in src/ (mpmath only); its outputs
are frozen into tests/test_series.py and tests/test_acceptance.py.

Usage: python scripts/series_oracle.py            (takes a few minutes)
"""

import mpmath as mp

mp.mp.dps = 30

EM_N = 100_000
TINY_BREAK = mp.mpf(10) ** -40

CASES = [
    # (r, a, tau)
    (2.0, 0.0, 0.0),
    (2.0, 1.0, 0.0),
    (2.0, 0.0, 1.0),
]

LAMBDAS = ["0.1", "0.05", "0.025", "0.02", "0.0125", "0.01"]


def eps_of(r, lam):
    return 1 / mp.sqrt(r - 1 + lam)


def make_f(r, a, tau, eps, m):
    """Continuous summand f(x) = x^(r-2) (ln x)^a exp{-m ln x/(eps+tau/ln x)^2},
    valid for x >= 3 (no log-floor there)."""
    def f(x):
        ln = mp.log(x)
        return mp.power(x, r - 2) * mp.power(ln, a) * mp.exp(-m * ln / (eps + tau / ln) ** 2)
    return f


def integral_from(f, r, a, tau, eps, m, n0):
    """int_{n0}^inf f(x) dx via y = log x, scaled so the integrand decays like e^-u."""
    y0 = mp.log(n0)
    rho = m / eps ** 2 - (r - 1)  # asymptotic decay rate in y
    assert rho > 0

    def g(u):
        y = y0 + u / rho
        return mp.power(y, a) * mp.exp((r - 1) * y - m * y / (eps + tau / y) ** 2)

    return mp.quad(g, [0, mp.inf]) / rho


def inner_sum(r, a, tau, eps, m):
    """sum_{n>=1} n^(r-2) (log n)^a exp{-m log n/(eps+tau/log n)^2}."""
    total = (1 + mp.power(2, r - 2)) * mp.exp(-m / (eps + tau) ** 2)
    f = make_f(r, a, tau, eps, m)
    n = 3
    while n < EM_N:
        v = f(n)
        total += v
        if v < TINY_BREAK and n > 50:
            return total
        n += 1
    # Euler-Maclaurin closure at N: sum_{n>=N} f = int + f(N)/2 - f'/12 + f'''/720
    total += integral_from(f, r, a, tau, eps, m, EM_N)
    total += f(EM_N) / 2
    total -= mp.diff(f, EM_N, 1) / 12
    total += mp.diff(f, EM_N, 3) / 720
    return total


def inner_sum_zeta(r, a, tau, eps, m):
    """Closed form of inner_sum for tau = 0, r = 2, a in {0, 1}."""
    assert tau == 0 and r == 2
    s = m / eps ** 2
    if a == 0:
        return 2 * mp.exp(-s) + mp.zeta(s) - 1 - mp.power(2, -s)
    if a == 1:
        return 2 * mp.exp(-s) - mp.zeta(s, 1, 1) - mp.log(2) * mp.power(2, -s)
    raise ValueError(a)


def normalized(r, a, tau, lam, inner=inner_sum):
    eps = eps_of(r, lam)
    total = mp.mpf(0)
    k = 0
    while True:
        m = (2 * k + 1) ** 2
        term = mp.mpf(-1) ** k / (2 * k + 1) * inner(r, a, tau, eps, m)
        total += term
        if abs(term) < mp.mpf(10) ** (-(mp.mp.dps - 8)) * max(abs(total), 1):
            break
        k += 1
    return mp.power(lam, a + 1) * (4 / mp.pi) * total


def neville_to_zero(xs, ys):
    """Polynomial extrapolation of (xs, ys) to x = 0 (Neville's scheme)."""
    t = list(ys)
    n = len(t)
    for m_ in range(1, n):
        for i in range(n - m_):
            t[i] = (xs[i + m_] * t[i] - xs[i] * t[i + 1]) / (xs[i + m_] - xs[i])
    return t[0]


def main():
    print("# cross-check: Euler-Maclaurin route vs zeta closed form (tau=0, r=2)")
    for a in (0.0, 1.0):
        for s in ("0.1", "0.01"):
            lam = mp.mpf(s)
            em = normalized(2.0, a, 0.0, lam, inner=inner_sum)
            zf = normalized(2.0, a, 0.0, lam, inner=inner_sum_zeta)
            print(f"  a={a} lam={s}:  em={mp.nstr(em, 20)}  zeta={mp.nstr(zf, 20)}  "
                  f"reldiff={mp.nstr(abs(em - zf) / zf, 3)}")

    print()
    for (r, a, tau) in CASES:
        analytic = 4 / mp.pi * mp.exp(2 * tau * mp.power(r - 1, mp.mpf(3) / 2)) * mp.gamma(a + 1)
        inner = inner_sum_zeta if (tau == 0 and r == 2 and a in (0.0, 1.0)) else inner_sum
        print(f"# case r={r} a={a} tau={tau}   analytic limit = {mp.nstr(analytic, 20)}")
        vals = {}
        for s in LAMBDAS:
            lam = mp.mpf(s)
            v = normalized(r, a, tau, lam, inner=inner)
            vals[s] = v
            print(f"  lam={s:8s} normalized={mp.nstr(v, 20)}   "
                  f"ratio_to_limit={mp.nstr(v / analytic, 10)}")
        sched = ["0.1", "0.05", "0.025", "0.0125"]
        extrap = neville_to_zero([mp.mpf(s) for s in sched], [vals[s] for s in sched])
        print(f"  neville over {sched}: {mp.nstr(extrap, 20)}   "
              f"ratio_to_limit={mp.nstr(extrap / analytic, 10)}")
        print()

    v1 = normalized(2.0, 0.0, 1.0, mp.mpf("0.05"))
    v0 = normalized(2.0, 0.0, 0.0, mp.mpf("0.05"), inner=inner_sum_zeta)
    print(f"# drift ratio at lam=0.05: {mp.nstr(v1 / v0, 20)}  e^2={mp.nstr(mp.exp(2), 20)}  "
          f"ratio/e^2={mp.nstr(v1 / v0 / mp.exp(2), 10)}")


if __name__ == "__main__":
    main()
