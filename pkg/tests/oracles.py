"""Independent oracles used to freeze expected values.

Exact rational arithmetic (fractions.Fraction) for the geometry and the
piecewise-linear functions, and a literal brute-force maximization over the
dyadic rescalings for the envelope.  These never call the code paths they
check beyond the block psi itself in the brute-force case.
"""

import math
from fractions import Fraction

HALF = Fraction(1, 2)


def exact_geometry(k1: Fraction, k2: Fraction, k_star: Fraction):
    """Crossing of y = k_star x with y = -k2/2 + k1 (x + 1/2), plus k_plus."""
    x_star = (k1 - k2) / (2 * (k_star - k1))
    y_star = k_star * x_star
    k_plus = (y_star + k2) / (x_star + 1)
    return x_star, y_star, k_plus


def exact_psi(k1: Fraction, k2: Fraction, k_plus: Fraction, x: Fraction) -> Fraction:
    if x <= -1 or x >= -HALF:
        return k2 * x
    return min(-k2 + k_plus * (x + 1), -k2 / 2 + k1 * (x + HALF))


def exact_eta(k1: Fraction, k2: Fraction, k_plus: Fraction, x: Fraction,
              j_max: int = 400) -> Fraction:
    """Envelope by locating the dyadic interval of x with exact rationals."""
    if x >= 0 or x <= -HALF:
        return k2 * x
    t = -x
    for j in range(1, j_max + 1):
        hi = Fraction(1, 2 ** j)
        lo = hi / 2
        if t == hi or t == lo:
            return k2 * x  # dyadic endpoint: all branches agree
        if lo < t < hi:
            return exact_psi(k1, k2, k_plus, (2 ** j) * x) / 2 ** j
    return k2 * x


def eta_bruteforce(triple, x: float, j_max: int = 60) -> float:
    """Literal max over j = 1..j_max of 2^-j psi(2^j x)."""
    best = -math.inf
    for j in range(1, j_max + 1):
        cand = math.ldexp(triple.psi(math.ldexp(x, j)), -j)
        if cand > best:
            best = cand
    return best


def system_residuals(triple, lam: float, u: float, v: float):
    """Plain substitution of (u, v) into both discounted equations."""
    return lam * u + triple.f(u - v), lam * v + triple.g(v - u)
