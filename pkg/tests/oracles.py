"""Arbitrary-precision reference implementations, independent of the library.

Everything here is written directly from the defining formulas with mpmath
and brute-force partial sums; nothing imports the package under test.
"""

import mpmath as mp

mp.mp.dps = 60


def ref_number(n, q, p):
    q, p = mp.mpc(q), mp.mpc(p)
    if n == 0:
        return mp.mpc(0)
    if abs(q - 1 / p) < mp.mpf("1e-40"):
        return n * q ** (n - 1)
    return (q ** n - p ** (-n)) / (q - 1 / p)


def ref_factorial(n, q, p):
    f = mp.mpc(1)
    for k in range(1, n + 1):
        f *= ref_number(k, q, p)
    return f


def ref_abs_factorial(n, q, p):
    f = mp.mpf(1)
    for k in range(1, n + 1):
        f *= abs(ref_number(k, q, p))
    return f


def ref_exp1(x, q, p, terms=200):
    return complex(mp.fsum(mp.mpc(x) ** n / ref_factorial(n, q, p)
                           for n in range(terms)))


def ref_exp2(x, q, p, terms=200):
    return complex(mp.fsum(mp.mpc(x) ** n / ref_abs_factorial(n, q, p)
                           for n in range(terms)))


def ref_wbar(y, q, p, terms=300):
    return complex(mp.fsum(ref_abs_factorial(n, q, p) * mp.mpc(0, y) ** n
                           / (mp.pi * mp.factorial(n)) for n in range(terms)))


def gamma_moment(n):
    """Direct quadrature of the n-th moment of exp(-x) on [0, inf)."""
    return float(mp.quad(lambda x: x ** n * mp.exp(-x), [0, mp.inf]))
