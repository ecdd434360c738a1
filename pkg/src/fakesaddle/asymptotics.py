"""Closed-form transition-map asymptotics across the singular fiber.

For a hyperbolic fake saddle the transition map between the sections
{x = alpha} and {x = omega} is linear to leading order,
Pi(y) = exp(gamma_pm) * y + o(y), with

    gamma_pm = PV int_alpha^omega g1(x,0) / (x f1(x,0)) dx
               +- pi (2 b - c (a + b)) / sqrt(d).

The principal value is computed through its convergent regularization

    PV = c log|omega/alpha| + int (g1/f1 - c) dx / x,

whose integrand is a plain rational function here: with exact
coefficients (g1 - c f1)(x, 0) vanishes at 0 and the x is divided out
symbolically, so no principal-value tricks are needed inside the
quadrature engine.  An independent brute-force epsilon-limit oracle and
a second route to the leading coefficient through the directional
saddles' L-integrals cross-validate every value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Sequence, Tuple

from . import _univariate as u1
from .normalform import Invariants, NormalFormField, invariants

QUAD_ABS_TOL = 1e-10
QUAD_MAX_EVALS = 10 ** 6


class SectionInvalid(Exception):
    """Sections out of order or f1(x,0) not positive between them."""


class QuadratureNonConvergent(Exception):
    """Adaptive quadrature exhausted its evaluation budget."""


class NotHyperbolicFakeSaddle(Exception):
    """Operation requires invariants with d > 0."""


class IntegrandSingularOnPath(Exception):
    """An L-integrand denominator vanishes on the integration range."""


class TailNotIntegrable(Exception):
    """Symmetric principal value at infinity does not exist."""


@dataclass(frozen=True)
class SectionPair:
    """Transverse sections {x = alpha} and {x = omega}, alpha < 0 < omega."""

    alpha: float
    omega: float

    def __post_init__(self):
        if not (self.alpha < 0 < self.omega):
            raise SectionInvalid(
                f"need alpha < 0 < omega, got ({self.alpha}, {self.omega})")


@dataclass(frozen=True)
class TransitionReport:
    """Every intermediate of the transition computation, for audit."""

    pv: float
    gamma0: float
    gamma_plus: float
    gamma_minus: float
    delta00_closed: float
    delta00_via_L: float | None
    quadrature_error_estimates: Tuple[float, ...]

    def to_json(self) -> dict:
        return {"pv": self.pv, "gamma0": self.gamma0,
                "gamma_plus": self.gamma_plus, "gamma_minus": self.gamma_minus,
                "delta00_closed": self.delta00_closed,
                "delta00_via_L": self.delta00_via_L,
                "quadrature_error_estimates":
                    list(self.quadrature_error_estimates)}


# -- quadrature engine ---------------------------------------------------------


def adaptive_quad(f: Callable[[float], float], a: float, b: float,
                  abs_tol: float = QUAD_ABS_TOL,
                  max_evals: int = QUAD_MAX_EVALS) -> Tuple[float, float]:
    """Adaptive Simpson integral of f over the oriented interval [a, b].

    Nested interval-doubling refinement with Richardson correction;
    returns (value, error estimate).  Raises QuadratureNonConvergent
    past the evaluation cap.
    """
    if a == b:
        return 0.0, 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    evals = 3
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, abs_tol, 0)]
    total = 0.0
    err_total = 0.0
    while stack:
        a0, b0, fa0, fm0, fb0, s0, tol, depth = stack.pop()
        m0 = 0.5 * (a0 + b0)
        lm, rm = 0.5 * (a0 + m0), 0.5 * (m0 + b0)
        flm, frm = f(lm), f(rm)
        evals += 2
        if evals > max_evals:
            raise QuadratureNonConvergent(
                f"more than {max_evals} evaluations on [{a}, {b}]")
        sl = (m0 - a0) / 6.0 * (fa0 + 4.0 * flm + fm0)
        sr = (b0 - m0) / 6.0 * (fm0 + 4.0 * frm + fb0)
        delta = sl + sr - s0
        if abs(delta) <= 15.0 * tol or depth >= 54:
            total += sl + sr + delta / 15.0
            err_total += abs(delta) / 15.0
        else:
            stack.append((a0, m0, fa0, flm, fm0, sl, tol / 2.0, depth + 1))
            stack.append((m0, b0, fm0, frm, fb0, sr, tol / 2.0, depth + 1))
    return total, err_total


def _ratio_fn(num: Sequence, den: Sequence) -> Callable[[float], float]:
    nc = tuple(float(c) for c in reversed(list(num))) or (0.0,)
    dc = tuple(float(c) for c in reversed(list(den)))

    def f(t: float) -> float:
        n = 0.0
        for c in nc:
            n = n * t + c
        d = 0.0
        for c in dc:
            d = d * t + c
        return n / d

    return f


# -- section checks and the regularized integrand ------------------------------


def _f1_g1_profiles(nf: NormalFormField):
    f1x = nf.f1.restrict_y0()
    g1x = nf.g1.restrict_y0()
    if not f1x:
        raise SectionInvalid("f1(x, 0) is identically zero")
    if not g1x:
        g1x = [Fraction(0)] if not nf.is_float else [0.0]
    return f1x, g1x


def validate_sections(nf: NormalFormField, sections: SectionPair) -> None:
    """Check f1(x,0) > 0 on [alpha, omega] (exact root isolation when
    coefficients are rational, sign sweep otherwise)."""
    f1x, _ = _f1_g1_profiles(nf)
    if not u1.positive_on_interval(f1x, sections.alpha, sections.omega):
        raise SectionInvalid(
            f"f1(x,0) is not positive on [{sections.alpha}, {sections.omega}]")


def _regularized_integrand(nf: NormalFormField):
    """(g1/f1 - c)/x as the rational function m(x)/f1(x,0) plus c.

    m is (g1 - c f1)(x, 0) with its exactly-zero constant term divided
    out, so the integrand has no singularity at 0 at all.
    """
    f1x, g1x = _f1_g1_profiles(nf)
    c = g1x[0]
    n = u1.sub_(list(g1x), u1.scale(list(f1x), c))
    if n and n[0] != 0:
        if abs(float(n[0])) > 1e-12:
            raise SectionInvalid("g1 - c*f1 does not vanish at the origin")
        n[0] = 0
    m = n[1:] if n else []
    return _ratio_fn(m, f1x), c


def pv_integral(nf: NormalFormField, sections: SectionPair,
                abs_tol: float = QUAD_ABS_TOL) -> float:
    """Principal value of int g1(x,0) / (x f1(x,0)) dx over the sections."""
    value, _err = _pv_integral_with_err(nf, sections, abs_tol)
    return value


def _pv_integral_with_err(nf, sections, abs_tol=QUAD_ABS_TOL):
    validate_sections(nf, sections)
    h, c = _regularized_integrand(nf)
    val, err = adaptive_quad(h, sections.alpha, sections.omega, abs_tol)
    return float(c) * math.log(sections.omega / -sections.alpha) + val, err


def _richardson(values: Sequence[float], ratio: float) -> Tuple[float, float]:
    """Richardson table for values at geometrically shrinking steps."""
    table = [list(values)]
    while len(table[-1]) > 1:
        m = len(table)
        r = ratio ** m
        prev = table[-1]
        table.append([(r * prev[i + 1] - prev[i]) / (r - 1.0)
                      for i in range(len(prev) - 1)])
    best = table[-1][0]
    second = table[-2][0] if len(table) > 1 else best
    return best, abs(best - second)


def pv_integral_eps_oracle(nf: NormalFormField, sections: SectionPair,
                           eps_sequence: Sequence[float] | None = None) -> float:
    """Brute-force symmetric-epsilon limit of the raw integrand.

    Integrates g1 / (x f1) on [alpha, -eps] and [eps, omega] for a
    geometric epsilon sequence and extrapolates the limit (Richardson in
    log eps).  Serves as the independence oracle for pv_integral.
    """
    validate_sections(nf, sections)
    f1x, g1x = _f1_g1_profiles(nf)
    raw = _ratio_fn(g1x, [0] + list(f1x))  # g1(x,0) / (x f1(x,0))
    if eps_sequence is None:
        base = min(1e-2, min(-sections.alpha, sections.omega) / 4.0)
        eps_sequence = [base * 10.0 ** (-k) for k in range(5)]
    eps_sequence = list(eps_sequence)
    ratios = {round(eps_sequence[i] / eps_sequence[i + 1], 9)
              for i in range(len(eps_sequence) - 1)}
    if len(ratios) != 1:
        raise ValueError("eps_sequence must be geometric")
    ratio = ratios.pop()
    vals = []
    for eps in eps_sequence:
        left, _ = adaptive_quad(raw, sections.alpha, -eps, 1e-11)
        right, _ = adaptive_quad(raw, eps, sections.omega, 1e-11)
        vals.append(left + right)
    best, _resid = _richardson(vals, ratio)
    return best


def pv_integral_sym_infinite(nf: NormalFormField, tol: float = 1e-8) -> float:
    """Symmetric principal value over the whole line, sections at infinity.

    Requires the profile g1(x,0)/f1(x,0) to be a degree-matched rational
    function (bounded at infinity) with nonvanishing f1; the integral is
    folded to [0, inf) where the integrand is the even rational function
    [G(x) - G(-x)]/x, truncated at an adaptively grown R with the tail
    integrated analytically through order 1/R^3.
    """
    f1x, g1x = _f1_g1_profiles(nf)
    if u1.degree(list(g1x)) > u1.degree(list(f1x)):
        raise TailNotIntegrable(
            "g1(x,0)/f1(x,0) grows at infinity; no symmetric principal value")
    exact = all(not isinstance(c, float) for c in list(f1x) + list(g1x))
    if exact:
        if u1.ev(f1x, Fraction(0)) <= 0 or u1.count_real_roots(f1x) != 0:
            raise SectionInvalid("f1(x,0) vanishes on the real line")
    else:
        if not u1.positive_on_interval(f1x, -1e4, 1e4, refinement=4096):
            raise SectionInvalid("f1(x,0) vanishes on the real line")

    f_neg = u1.negate_var(list(f1x))
    g_neg = u1.negate_var(list(g1x))
    big_n = u1.sub_(u1.mul(list(g1x), f_neg), u1.mul(g_neg, list(f1x)))
    big_n = [c if k % 2 == 1 else 0 * c for k, c in enumerate(big_n)]  # odd part
    m = u1.trim(big_n[1:])
    d = u1.mul(list(f1x), f_neg)
    integrand = _ratio_fn(m, d)

    # Laurent tail coefficients: E(x) = sum_k s_k x^-(gap+k)
    gap = u1.degree(d) - u1.degree(m) if m else 5
    tail_coeffs = []
    if m and gap <= 4:
        rev_m = list(reversed(u1.trim(m)))
        rev_d = list(reversed(u1.trim(d)))
        series = u1.series_div(rev_m, rev_d, 4 - gap)
        for k, s in enumerate(series):
            power = gap + k  # term s * x^-power
            if power >= 2:
                tail_coeffs.append((power, float(s)))

    def tail(r):
        return sum(s / ((p - 1) * r ** (p - 1)) for p, s in tail_coeffs)

    r = 16.0
    prev = None
    for _ in range(24):
        body, _err = adaptive_quad(integrand, 0.0, r, 1e-11)
        est = body + tail(r)
        if prev is not None and abs(est - prev) < tol / 2.0:
            return est
        prev = est
        r *= 2.0
    raise QuadratureNonConvergent("symmetric infinite principal value "
                                  "did not stabilize")


# -- the asymmetry term and the two leading-coefficient routes ----------------


def _sqrt_d(inv: Invariants) -> float:
    d = float(inv.d)
    if d <= 0:
        raise NotHyperbolicFakeSaddle(f"d = {d} is not positive")
    return math.sqrt(d)


def gamma0(inv: Invariants) -> float:
    """Asymmetry term pi (2b - c(a+b)) / sqrt(d); the two transition
    exponents are PV +- gamma0."""
    sd = _sqrt_d(inv)
    a, b, c = float(inv.a), float(inv.b), float(inv.c)
    return math.pi * (2.0 * b - c * (a + b)) / sd


def arctan_sum(a: float, b: float, c: float) -> float:
    """Four-term arctan combination behind the gamma0 closed form.

    Identically -pi on the region d > 0, which is what makes gamma0
    elementary; evaluated literally so that constancy can be tested.
    """
    d = 4.0 * (1.0 - c) - (a - b) ** 2
    if d <= 0:
        raise NotHyperbolicFakeSaddle(f"d = {d} is not positive")
    sd = math.sqrt(d)
    return (math.atan((b - a - 2.0) / sd)
            - math.atan((b - a + 2.0 - 2.0 * c) / sd)
            + math.atan((-b + a - 2.0) / sd)
            - math.atan((-b + a + 2.0 - 2.0 * c) / sd))


def gamma_pm(nf: NormalFormField,
             sections: SectionPair | None) -> Tuple[float, float]:
    """(gamma_plus, gamma_minus) = (PV + gamma0, PV - gamma0).

    ``sections=None`` means symmetric sections at infinity.
    """
    inv = invariants(nf)
    g0 = gamma0(inv)
    if sections is None:
        pv = pv_integral_sym_infinite(nf)
    else:
        pv = pv_integral(nf, sections)
    return pv + g0, pv - g0


def section_parametrization_derivatives(alpha: float, omega: float) -> Dict[str, float]:
    """First derivatives of the transverse-section parametrizations used
    when composing the two directional saddle maps (hard-wired values)."""
    return {"s111_minus": -1.0 / alpha, "s120_minus": -alpha,
            "s210_minus": 1.0, "s221_minus": 1.0,
            "s111_plus": 1.0, "s120_plus": 1.0,
            "s210_plus": omega, "s221_plus": 1.0 / omega}


def _closed_l_integrands(a, b, c):
    """Rational integrands of the divisor-side L-integrals.

    log L2_minus(u) integrates num_m / ((1-c) den_m) and log L1_plus(u)
    integrates num_p / ((1-c) den_p); both denominators have negative
    discriminant -d, hence no real roots when d > 0.
    """
    num_m = [-(a * c - c * c - b + c), c * (a - b - c + 2)]
    den_m = [1 - c, -a + b + 2 * c - 2, a - b - c + 2]
    num_p = [-(a * c + c * c - b - c), c * (a - b + c - 2)]
    den_p = [c - 1, -a + b - 2 * c + 2, a - b + c - 2]
    return num_m, den_m, num_p, den_p


def log_l_integrals(nf: NormalFormField, sections: SectionPair,
                    abs_tol: float = QUAD_ABS_TOL) -> Dict[str, float]:
    """The four log L values entering the composed leading coefficient.

    log L2_plus(omega) and log L1_minus(-alpha) integrate the fiber
    profile (g1/f1 - c)/x; log L2_minus(1) and log L1_plus(1) integrate
    the divisor-side closed-form rational integrands.  Denominators are
    checked for roots on the path by exact isolation and reported, never
    silently regularized.
    """
    inv = invariants(nf)
    _sqrt_d(inv)  # requires d > 0
    validate_sections(nf, sections)
    a, b, c = inv.a, inv.b, inv.c
    h, _c = _regularized_integrand(nf)

    num_m, den_m, num_p, den_p = _closed_l_integrands(a, b, c)
    for name, den, sign in (("L2_minus", den_m, 1), ("L1_plus", den_p, -1)):
        if not u1.positive_on_interval(u1.scale(den, sign), 0, 1):
            raise IntegrandSingularOnPath(
                f"denominator of the {name} integrand vanishes on (0, 1]")
    lam = 1 - c
    psi_m = _ratio_fn(num_m, u1.scale(den_m, lam))
    psi_p = _ratio_fn(num_p, u1.scale(den_p, lam))

    l2p, e1 = adaptive_quad(h, 0.0, sections.omega, abs_tol)
    l1m, e2 = adaptive_quad(h, 0.0, sections.alpha, abs_tol)
    l2m, e3 = adaptive_quad(psi_m, 0.0, 1.0, abs_tol)
    l1p, e4 = adaptive_quad(psi_p, 0.0, 1.0, abs_tol)
    return {"log_L2_plus": l2p, "log_L1_minus": l1m,
            "log_L2_minus": l2m, "log_L1_plus": l1p,
            "errors": (e1, e2, e3, e4)}


def delta00_via_L(nf: NormalFormField, sections: SectionPair,
                  abs_tol: float = QUAD_ABS_TOL) -> float:
    """Leading transition coefficient assembled from the L-integrals.

    Composes the two directional saddle maps: with lam = 1 - c,

        delta00 = (-alpha)^(lam-1) L2+(omega) / (omega^(lam-1) L1-(-alpha))
                  * (L2-(1) / L1+(1))^lam,

    the section-parametrization derivatives having been folded in.
    Must agree with exp(gamma_plus) from the closed form.
    """
    inv = invariants(nf)
    lam = float(1 - inv.c)
    ls = log_l_integrals(nf, sections, abs_tol)
    log_delta = ((lam - 1.0) * (math.log(-sections.alpha) - math.log(sections.omega))
                 + ls["log_L2_plus"] - ls["log_L1_minus"]
                 + lam * (ls["log_L2_minus"] - ls["log_L1_plus"]))
    return math.exp(log_delta)


def log_l1_plus_closed(u: float, a: float, b: float, c: float) -> float:
    """Analytic fast path for log L1_plus(u) (log plus arctan terms).

    Valid whenever d > 0 keeps the denominator quadratic definite;
    quadrature remains the reference path.
    """
    d = 4.0 * (1.0 - c) - (a - b) ** 2
    if d <= 0:
        raise NotHyperbolicFakeSaddle(f"d = {d} is not positive")
    sd = math.sqrt(d)
    quad_val = (1.0 - c + (a - b + 2.0 * c - 2.0) * u
                + (-a + b - c + 2.0) * u * u)
    alpha_part = c / (2.0 * (1.0 - c)) * math.log(quad_val / (1.0 - c))
    pref = -((a + b) * c - 2.0 * b) / ((1.0 - c) * sd)
    beta_part = pref * (
        math.atan((2.0 * (1.0 - c) + b - a + 2.0 * (a - b + c - 2.0) * u) / sd)
        - math.atan((2.0 * (1.0 - c) + b - a) / sd))
    return alpha_part + beta_part


def log_l2_minus_closed(u: float, a: float, b: float, c: float) -> float:
    """Analytic fast path for log L2_minus(u) (mirror of log L1_plus)."""
    return log_l1_plus_closed(u, -a, -b, c)


def transition_report(nf: NormalFormField,
                      sections: SectionPair | None) -> TransitionReport:
    """Full transition computation with both leading-coefficient routes."""
    inv = invariants(nf)
    g0 = gamma0(inv)
    if sections is None:
        pv = pv_integral_sym_infinite(nf)
        errors: Tuple[float, ...] = ()
        via_l = None
    else:
        pv, pv_err = _pv_integral_with_err(nf, sections)
        ls = log_l_integrals(nf, sections)
        lam = float(1 - inv.c)
        log_delta = ((lam - 1.0) * (math.log(-sections.alpha)
                                    - math.log(sections.omega))
                     + ls["log_L2_plus"] - ls["log_L1_minus"]
                     + lam * (ls["log_L2_minus"] - ls["log_L1_plus"]))
        via_l = math.exp(log_delta)
        errors = (pv_err,) + tuple(ls["errors"])
    gp, gm = pv + g0, pv - g0
    return TransitionReport(pv=pv, gamma0=g0, gamma_plus=gp, gamma_minus=gm,
                            delta00_closed=math.exp(gp), delta00_via_L=via_l,
                            quadrature_error_estimates=errors)
