#!/usr/bin/env python3
"""Independent reference values for the C++ test suite.

Every pinned constant in tests/ traces back to a line printed here. The
computations use scipy/mpmath only, never the C++ code, so a test failure
means the implementation drifted, not the reference.

Run:  python3 tools/oracles.py
"""

import numpy as np
from fractions import Fraction
from scipy import integrate, special, stats


def banner(title):
    print(f"\n== {title} ==")


def scale_increment(drift, factors, a, lo, hi):
    """s(hi)-s(lo) for s'(u) = exp(-2 int_a^u drift) * prod of factors crossed.

    factors: list of (radius, (1-alpha)/alpha) applied for u above radius.
    """

    def sprime(u):
        expo = integrate.quad(drift, a, u, limit=200)[0]
        val = np.exp(-2.0 * expo)
        for r, f in factors:
            if u > r:
                val *= f
        return val

    total = 0.0
    cuts = sorted({lo, hi, *[r for r, _ in factors if lo < r < hi]})
    for s0, s1 in zip(cuts[:-1], cuts[1:]):
        total += integrate.quad(sprime, s0, s1, limit=200)[0]
    return total


def crossing_oracle():
    banner("crossing probability, d=3, membrane 0.5 with gamma (1,2)")
    a, lo, hi = 0.5, 0.45, 0.55
    drift = lambda r: 1.0 / r  # (d-1)/(2r), d=3
    for alpha, label in [(Fraction(2, 3), "alpha=2/3"), (Fraction(1, 3), "control alpha=1/3")]:
        fac = float((1 - alpha) / alpha)
        below = scale_increment(drift, [(a, fac)], a, lo, a)
        above = scale_increment(drift, [(a, fac)], a, a, hi)
        p = below / (below + above)
        print(f"  {label}: P(exit top) = {p:.15f}")
    print(f"  closed forms: 22/31 = {22/31:.15f}, 11/29 = {11/29:.15f}")
    p = 22 / 31
    se = np.sqrt(p * (1 - p) / 1e5)
    print(f"  binomial SE at n=1e5: {se:.6f}, 3*SE = {3*se:.6f}")


def driftless_crossing():
    banner("driftless crossing, membrane 1.0 gamma (1,2), shell (0.5, 1.5)")
    below = scale_increment(lambda r: 0.0, [(1.0, 0.5)], 1.0, 0.5, 1.0)
    above = scale_increment(lambda r: 0.0, [(1.0, 0.5)], 1.0, 1.0, 1.5)
    print(f"  P(exit top) = {below / (below + above):.15f} (closed form 2/3)")


def scale_oracles():
    banner("scale functions")
    # driftless, membrane 0.5 gamma (1,2): s(1) with s(0)=0
    s1 = 0.5 + 0.5 * 0.5
    print(f"  driftless one-membrane s(1) = {s1}")
    # bessel d=3, no membranes, ref a=1: s(r)-s(1) = 1 - 1/r
    for r in (2.0, 4.0):
        val = scale_increment(lambda u: 1.0 / u, [], 1.0, 1.0, r)
        print(f"  bessel increment s({r})-s(1) = {val:.15f} (closed {1-1/r:.15f})")


def a2_oracle():
    banner("a2 ratio for psi = |x|, d=3, any origin ball")
    print(f"  (avg psi)(avg 1/psi) = (3R/4)(3/(2R)) = {9/8}")


def growth_oracle():
    banner("volume growth, d=3")
    print("  psi = 1:            V(r) = 4 pi r^3 / 3, exponent 3")
    print("  psi = (1+r^2)^-1:   V(r) = 4 pi (r - arctan r), exponent -> 1")
    print("  psi = r^-2:         V(r) = 4 pi r, exponent 1")
    for rmax in (100.0, 1000.0):
        grid = np.logspace(0, np.log10(rmax), 25)
        tail = grid[grid >= 0.1 * rmax]
        vol = 4 * np.pi * (tail - np.arctan(tail))
        slope = np.polyfit(np.log(tail), np.log(vol), 1)[0]
        print(f"  fitted tail slope for (1+r^2)^-1 on 1..{rmax:g}: {slope:.6f}")


def occupation_oracle():
    banner("occupation ratio target, psi = (1+r^2)^-1, bands (1,2)/(2,3)")
    mass = lambda lo, hi: 4 * np.pi * ((hi - np.arctan(hi)) - (lo - np.arctan(lo)))
    ratio = mass(1, 2) / mass(2, 3)
    print(f"  mass(1,2) = {mass(1,2):.15f}")
    print(f"  mass(2,3) = {mass(2,3):.15f}")
    print(f"  ratio = {ratio:.15f}")


def moments_oracle():
    banner("moment identities")
    print("  E |x + W_T|^2 = |x|^2 + 3T (d=3); r0=1, T=1 -> 4")
    print(f"  E local time at 0 by time 1 (line BM from 0) = sqrt(2/pi) = {np.sqrt(2/np.pi):.15f}")
    print("  OU dX = -X dt + dW stationary variance = 1/2")


def stats_oracle():
    banner("distribution spot values")
    for z in (0.5, 1.0, 1.5, 2.0):
        print(f"  kolmogorov Q({z}) = {special.kolmogorov(z):.15f}")
    for x, df in ((1.0, 1), (2.0, 2), (10.0, 5)):
        print(f"  chi2_sf({x}, {df}) = {stats.chi2.sf(x, df):.15f}")
    for a, x in ((0.5, 0.5), (2.0, 1.0), (5.0, 10.0)):
        print(f"  gamma_q({a}, {x}) = {special.gammaincc(a, x):.15f}")


def dirichlet_oracle():
    banner("dirichlet form of the radial bump, rho = phi = 1, d=3, R=2")

    R = 2.0

    def fprime(r):
        t = (r / R) ** 2
        if t >= 1.0:
            return 0.0
        u = 1.0 - t
        F = np.exp(1.0 - 1.0 / u)
        return -F / u**2 * 2.0 * r / R**2

    val = 0.5 * integrate.quad(lambda r: fprime(r) ** 2 * 4 * np.pi * r**2, 0, R, limit=400)[0]
    print(f"  (1/2) int |f'|^2 4 pi r^2 dr = {val:.15f}")


def trace_oracle():
    banner("trace desk check: f = 1, rho = phi = 1, d=3, l=1")
    lhs = 4 * np.pi
    rhs = np.sqrt(8.0) * np.sqrt(4 * np.pi / 3) * np.sqrt(4 * np.pi / 3)
    print(f"  lhs = 4 pi = {lhs:.15f}")
    print(f"  rhs = sqrt(8) * 4 pi / 3 = {rhs:.15f}")
    print(f"  literal inequality holds: {lhs <= rhs}")


def fnv_oracle():
    banner("fnv-1a 64 test vectors")
    def fnv(s):
        h = 0xCBF29CE484222325
        for b in s.encode():
            h ^= b
            h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
        return h
    for s in ("", "a", "hello"):
        print(f'  fnv1a64("{s}") = {fnv(s)} (0x{fnv(s):016x})')


def truncation_oracle():
    banner("dyadic family truncation, tol = 1e-3")
    # l_k = 1 - 2^-(k+1), gamma_k = 1 + 2^-k on the annulus inside l_k,
    # gamma_top = 1. Coefficient of membrane k uses the next weight up.
    gamma = lambda k: 1.0 + 0.5**k
    kept = []
    dropped_inc = 0.0
    for k in range(0, 61):
        gl = gamma(k)
        gr = gamma(k + 1) if k < 60 else 1.0
        coeff = (gr - gl) / (gr + gl)
        if abs(coeff) >= 1e-3:
            kept.append(k)
        else:
            dropped_inc += abs(gr - gl)
    print(f"  retained k: {kept} (count {len(kept)})")
    print(f"  dropped weight increment = {dropped_inc} (exact 2^-8 = {2**-8})")
    print(f"  retained increment sum incl. jump to gamma_top = "
          f"{sum(abs(gamma(k+1)-gamma(k)) for k in range(7)) + abs(1.0-gamma(7))}")


def drift_oracle():
    banner("log-density drift, rho = (1+|x|^2)^-1 at x = (1,1,0)")
    print("  grad rho / (2 rho) = -x/(1+|x|^2) = (-1/3, -1/3, 0)")


if __name__ == "__main__":
    crossing_oracle()
    driftless_crossing()
    scale_oracles()
    a2_oracle()
    growth_oracle()
    occupation_oracle()
    moments_oracle()
    stats_oracle()
    dirichlet_oracle()
    trace_oracle()
    fnv_oracle()
    truncation_oracle()
    drift_oracle()
