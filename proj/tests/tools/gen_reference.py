#!/usr/bin/env python3
"""Arbitrary-precision reference values for the special-function tests.

Run from the repo root:  python3 tests/tools/gen_reference.py
Prints a C++ fragment that is pasted into tests/test_special.cpp.
All values are computed with mpmath at 50 significant digits and rounded
to 17 digits (enough to round-trip a double).
"""
import mpmath as mp

mp.mp.dps = 50


def norm_pdf(z):
    return mp.exp(-mp.mpf(z) ** 2 / 2) / mp.sqrt(2 * mp.pi)


def norm_cdf(z):
    return mp.erfc(-mp.mpf(z) / mp.sqrt(2)) / 2


def f_cdf(x, d1, d2):
    x, d1, d2 = mp.mpf(x), mp.mpf(d1), mp.mpf(d2)
    return mp.betainc(d1 / 2, d2 / 2, 0, d1 * x / (d1 * x + d2), regularized=True)


def f_pdf(x, d1, d2):
    x, d1, d2 = mp.mpf(x), mp.mpf(d1), mp.mpf(d2)
    lognum = (d1 / 2) * mp.log(d1 / d2) + (d1 / 2 - 1) * mp.log(x) \
        - ((d1 + d2) / 2) * mp.log(1 + d1 * x / d2)
    logbeta = mp.loggamma(d1 / 2) + mp.loggamma(d2 / 2) - mp.loggamma((d1 + d2) / 2)
    return mp.exp(lognum - logbeta)


def binom_logpmf(n, N, p):
    n, N, p = mp.mpf(n), mp.mpf(N), mp.mpf(p)
    return (mp.loggamma(N + 1) - mp.loggamma(n + 1) - mp.loggamma(N - n + 1)
            + n * mp.log(p) + (N - n) * mp.log(1 - p))


def emit(name, rows, fmt_args):
    print(f"// {name}")
    for row in rows:
        args = ", ".join(fmt_args(row[:-1]))
        print(f"    {{{args}, {mp.nstr(row[-1], 17)}}},")
    print()


phi_args = [-8.0, -5.0, -3.0, -2.5, -2.0, -1.5, -1.0, -0.7071067811865476,
            -0.5, -0.1, 0.0, 0.1, 0.5, 0.7071067811865476, 1.0, 1.5, 2.0,
            3.0, 5.0, 8.0]
emit("norm_cdf", [(z, norm_cdf(z)) for z in phi_args], lambda a: [repr(a[0])])
emit("norm_pdf", [(z, norm_pdf(z)) for z in phi_args], lambda a: [repr(a[0])])

f_args = [(0.5, 2, 2), (1.0, 2, 2), (2.0, 2, 2), (0.1, 5, 5), (0.5, 5, 5),
          (1.0, 5, 5), (3.0, 5, 5), (0.2, 10, 10), (0.8, 10, 10), (1.0, 10, 10),
          (1.2, 10, 10), (2.5, 10, 10), (0.5, 20, 20), (1.0, 20, 20),
          (1.5, 20, 20), (1.0, 40, 40), (1.3, 40, 40), (0.7, 100, 100),
          (1.0, 100, 100), (1.05, 112, 112)]
emit("f_cdf", [(x, d1, d2, f_cdf(x, d1, d2)) for x, d1, d2 in f_args],
     lambda a: [repr(a[0]), str(a[1]), str(a[2])])
emit("f_pdf", [(x, d1, d2, f_pdf(x, d1, d2)) for x, d1, d2 in f_args],
     lambda a: [repr(a[0]), str(a[1]), str(a[2])])

b_args = [(0, 1, 0.5), (1, 1, 0.5), (0, 10, 0.5), (5, 10, 0.5), (10, 10, 0.5),
          (7, 10, 0.3), (0, 10, 0.01), (10, 10, 0.99), (3, 20, 0.15),
          (17, 20, 0.85), (56, 112, 0.5), (0, 112, 0.5), (112, 112, 0.5),
          (30, 112, 0.25), (84, 112, 0.75), (1, 150, 0.001), (149, 150, 0.999),
          (75, 150, 0.5), (60, 120, 0.55), (100, 200, 0.5)]
emit("binom_logpmf", [(n, N, p, binom_logpmf(n, N, p)) for n, N, p in b_args],
     lambda a: [str(a[0]), str(a[1]), repr(a[2])])

# assorted single-value anchors used in other tests
print("// anchors")
print("norm_cdf(1/sqrt(2)) =", mp.nstr(norm_cdf(mp.mpf(1) / mp.sqrt(2)), 17))
print("2*norm_pdf(0)       =", mp.nstr(2 * norm_pdf(0), 17))
print("mills(0)            =", mp.nstr(norm_pdf(0) / norm_cdf(0), 17))
