"""Shared helpers: seeded random normal-form generators.

Coefficients are small exact rationals so that f1(x, 0) stays positive
on [-1, 1] by construction and every identity can be checked exactly.
"""

import random
from fractions import Fraction

import pytest

from fakesaddle.normalform import NormalFormField
from fakesaddle.polyfield import Poly2


def frac(rng, lo=-8, hi=8, den=16):
    return Fraction(rng.randint(lo, hi), den)


def random_invariant_triple(rng, d_positive=False):
    """Random exact (a, b, c); optionally constrained to d > 0."""
    while True:
        a = Fraction(rng.randint(-24, 24), 16)
        b = Fraction(rng.randint(-24, 24), 16)
        c = Fraction(rng.randint(-24, 12), 16)
        d = 4 * (1 - c) - (a - b) ** 2
        if not d_positive or d > Fraction(1, 25):
            return a, b, c


def random_normal_form(rng, d_positive=False):
    """Random polynomial member with f1(x,0) > 0 on [-1, 1].

    f1 and f2 have constant term 1 and x-profile coefficients bounded by
    1/4 in absolute value (at most three of them), so the profile cannot
    vanish on the unit interval.
    """
    a, b, c = random_invariant_triple(rng, d_positive=d_positive)
    x, y = Poly2.gens()
    f1 = Poly2.const(1)
    for k in (1, 2, 3):
        f1 = f1 + x ** k * Fraction(rng.randint(-4, 4), 16)
    f1 = f1 + x * y * frac(rng) + y ** 2 * frac(rng)
    f2 = Poly2.const(1) + x * frac(rng) + y * frac(rng)
    g1 = Poly2.const(c)
    for k in (1, 2):
        g1 = g1 + x ** k * frac(rng)
    g1 = g1 + y * frac(rng) + x * y * frac(rng)
    g2 = Poly2.const(b) + Poly2.from_univariate([0, frac(rng), frac(rng)],
                                                var=1)
    return NormalFormField(f1, f2, g1, g2, a)


@pytest.fixture
def rng():
    return random.Random(20260808)
