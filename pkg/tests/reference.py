"""Straight-line reference formulas for the benchmark, independent of the package."""
import math
from fractions import Fraction

A = (1.5, 2.0)
B = (2.0, 3.0)


def cost(u):
    return sum((x + 0.5) ** 4 - 30 * x ** 2 - 20 * x for x in u) / 100


def constraint(u, d):
    poly = sum(0.05 * (x - a * d) ** 4 - b * (x - a * d) ** 2 for x, a, b in zip(u, A, B))
    return poly - (1 - 0.1 * d) ** 2


def constraint_exact(u, d):
    """Rational arithmetic version for exact example values."""
    u = [Fraction(str(x)) for x in u]
    d = Fraction(str(d))
    a = [Fraction(3, 2), Fraction(2)]
    b = [Fraction(2), Fraction(3)]
    poly = sum(Fraction(1, 20) * (x - ai * d) ** 4 - bi * (x - ai * d) ** 2 for x, ai, bi in zip(u, a, b))
    return poly - (1 - d / 10) ** 2


def cost_exact(u):
    u = [Fraction(str(x)) for x in u]
    return sum((x + Fraction(1, 2)) ** 4 - 30 * x ** 2 - 20 * x for x in u) / 100


def scenario_bound_mp(alpha, beta, n_u):
    import mpmath

    mpmath.mp.dps = 50
    a = mpmath.mpf(str(alpha))
    b = mpmath.mpf(str(beta))
    value = 2 / a * mpmath.log(1 / b) + 2 * n_u + 2 * n_u / a * mpmath.log(2 / a)
    return int(mpmath.ceil(value))


def binomial_se(p, n):
    return math.sqrt(p * (1 - p) / n)
