"""Internal helpers for univariate polynomials given as coefficient lists.

A polynomial c0 + c1*t + ... + cn*t^n is the list [c0, c1, ..., cn].
Coefficients are Fractions in exact mode or floats in float mode; all
functions work with either, but root counting (Sturm) requires exact
coefficients to be meaningful.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt


def trim(coeffs):
    """Drop trailing zero coefficients; the zero polynomial is []."""
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return c


def degree(coeffs):
    c = trim(coeffs)
    return len(c) - 1 if c else -1


def ev(coeffs, t):
    """Horner evaluation; exact when coeffs and t are rational."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def deriv(coeffs):
    return [k * c for k, c in enumerate(coeffs)][1:]


def add(a, b):
    n = max(len(a), len(b))
    return trim([(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0)
                 for k in range(n)])


def sub_(a, b):
    return add(a, [-c for c in b])


def scale(a, s):
    return trim([s * c for c in a])


def mul(a, b):
    a, b = trim(a), trim(b)
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return trim(out)


def negate_var(a):
    """Coefficients of p(-t)."""
    return trim([(-c if k % 2 else c) for k, c in enumerate(a)])


def eq(a, b):
    return trim(a) == trim(b)


def divmod_poly(a, b):
    """Polynomial division a = q*b + r over the coefficient field."""
    a, b = trim(a), trim(b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    q = [0] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(r) - 1 >= db and trim(r):
        k = len(r) - 1 - db
        f = r[-1] / lb
        q[k] = f
        for i, cb in enumerate(b):
            r[k + i] -= f * cb
        r = trim(r) if trim(r) else []
        if not r:
            break
        # guard against non-decreasing degrees from float fuzz
        if len(r) - 1 >= k + db:
            r = r[:k + db]
            r = trim(r)
    return trim(q), trim(r)


def _sign(v):
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def _sign_at_inf(coeffs, positive_end):
    c = trim(coeffs)
    if not c:
        return 0
    lead = c[-1]
    if positive_end or (len(c) - 1) % 2 == 0:
        return _sign(lead)
    return -_sign(lead)


def sturm_chain(coeffs):
    chain = [trim(coeffs)]
    d = deriv(chain[0])
    if trim(d):
        chain.append(trim(d))
        while True:
            _, r = divmod_poly(chain[-2], chain[-1])
            r = trim(r)
            if not r:
                break
            chain.append([-c for c in r])
    return chain


def _sign_variations(values):
    v, prev = 0, 0
    for s in values:
        if s == 0:
            continue
        if prev != 0 and s != prev:
            v += 1
        prev = s
    return v


def count_real_roots(coeffs, lo=None, hi=None):
    """Number of distinct real roots in (lo, hi]; None means -inf / +inf.

    Exact for Fraction coefficients.  Endpoints must not be roots when
    finite (callers check f(lo), f(hi) separately).
    """
    chain = sturm_chain(coeffs)
    if len(chain) == 1 and degree(chain[0]) <= 0:
        return 0
    at_lo = [(_sign_at_inf(p, False) if lo is None else _sign(ev(p, lo)))
             for p in chain]
    at_hi = [(_sign_at_inf(p, True) if hi is None else _sign(ev(p, hi)))
             for p in chain]
    return _sign_variations(at_lo) - _sign_variations(at_hi)


def positive_on_interval(coeffs, lo, hi, refinement=256):
    """True when the polynomial is strictly positive on [lo, hi].

    Exact (Sturm) for rational coefficients; a sign sweep on a grid
    otherwise.
    """
    c = trim(coeffs)
    if not c:
        return False
    exact = all(not isinstance(x, float) for x in c)
    if exact:
        flo = Fraction(lo) if not isinstance(lo, Fraction) else lo
        fhi = Fraction(hi) if not isinstance(hi, Fraction) else hi
        if ev(c, flo) <= 0 or ev(c, fhi) <= 0:
            return False
        return count_real_roots(c, flo, fhi) == 0
    lo_f, hi_f = float(lo), float(hi)
    for k in range(refinement + 1):
        t = lo_f + (hi_f - lo_f) * k / refinement
        if ev(c, t) <= 0.0:
            return False
    return True


def series_div(num, den, order):
    """Power-series coefficients of num/den up to t^order; den[0] != 0."""
    if not den or den[0] == 0:
        raise ZeroDivisionError("series division needs den(0) != 0")
    out = []
    acc = list(num) + [0] * max(0, order + 1 - len(num))
    for k in range(order + 1):
        s = acc[k] / den[0]
        out.append(s)
        for i in range(1, min(len(den), order + 1 - k)):
            acc[k + i] -= s * den[i]
    return out


def sqrt_fraction(value):
    """Exact square root of a nonnegative Fraction, or None."""
    fr = Fraction(value)
    if fr < 0:
        return None
    rn, rd = isqrt(fr.numerator), isqrt(fr.denominator)
    if rn * rn == fr.numerator and rd * rd == fr.denominator:
        return Fraction(rn, rd)
    return None
