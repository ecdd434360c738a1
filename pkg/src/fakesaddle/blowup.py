"""Quadratic blow-up charts, exceptional-divisor reports and saddle data.

The chart catalog is deliberately closed: the four charts below are the
only ones with exactness guarantees here, and anything else raises
UnsupportedChart.  Each chart substitutes old coordinates (x, y) by
polynomials in the new pair (u, v):

    X_DIR          (x, y) = (u, u v),        divisor u = 0
    X_DIR_SWAPPED  (x, y) = (v, u v),        divisor v = 0
    PI_PLUS        (x, y) = (u (1-v), u v),  divisor u = 0
    PI_MINUS       (x, y) = (-u (1-v), u v), divisor u = 0

Blowing up means pulling back (chain-rule solve, monomial Jacobian
determinant) and then dividing exactly by divisor**divide_power.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from . import _univariate as u1
from ._univariate import sqrt_fraction
from .normalform import NormalFormField, Verdict, classify, invariants
from .polyfield import NotDivisible, PlanarField, Poly2, divide_exact, substitute


class UnsupportedChart(Exception):
    """Chart outside the closed catalog."""


class NotAFakeSaddle(Exception):
    """Saddle data requested for invariants with d <= 0."""


class ChartKind(enum.Enum):
    X_DIR = "x_dir"
    X_DIR_SWAPPED = "x_dir_swapped"
    PI_PLUS = "pi_plus"
    PI_MINUS = "pi_minus"


@dataclass(frozen=True)
class BlowupChart:
    kind: ChartKind
    divide_power: int = 1

    def substitution(self) -> Tuple[Poly2, Poly2, Poly2]:
        """(sub_x, sub_y, divisor) for this chart."""
        u, v = Poly2.gens()
        if self.kind is ChartKind.X_DIR:
            return u, u * v, u
        if self.kind is ChartKind.X_DIR_SWAPPED:
            return v, u * v, v
        if self.kind is ChartKind.PI_PLUS:
            return u * (1 - v), u * v, u
        if self.kind is ChartKind.PI_MINUS:
            return -u * (1 - v), u * v, u
        raise UnsupportedChart(str(self.kind))


@dataclass(frozen=True)
class BlowupResult:
    """Blown-up field plus the attempted u d/du, v d/dv factorization.

    ``u_factor`` is field.p / u when that division is exact (the new
    first coordinate axis, i.e. the strict-transform fiber direction, is
    invariant), else None; likewise ``v_factor`` for field.q / v (the
    exceptional divisor).  A missing factor flags a fiber or divisor the
    field is not tangent to, which doubles as an input sanity check.
    """

    field: PlanarField
    chart: BlowupChart
    u_factor: Poly2 | None
    v_factor: Poly2 | None

    @property
    def divisor_invariant(self) -> bool:
        return self.v_factor is not None


def blow_up(field: PlanarField, chart: BlowupChart) -> BlowupResult:
    """Pull back through the chart and divide by divisor**divide_power."""
    sub_x, sub_y, divisor = chart.substitution()
    pulled = substitute(field, sub_x, sub_y)
    if pulled.denom is not None:
        raise NotDivisible("pullback", pulled.denom)
    result = divide_exact(pulled, divisor, chart.divide_power)
    u, v = Poly2.gens()
    try:
        uf = result.p.divide_exact(u)
    except NotDivisible:
        uf = None
    try:
        vf = result.q.divide_exact(v)
    except NotDivisible:
        vf = None
    return BlowupResult(result, chart, uf, vf)


@dataclass(frozen=True)
class DivisorRoot:
    location: float
    multiplicity: int
    nonzero_eigenvalue: bool

    def to_json(self) -> dict:
        return {"location": self.location, "multiplicity": self.multiplicity,
                "nonzero_eigenvalue": self.nonzero_eigenvalue}


@dataclass(frozen=True)
class DivisorReport:
    """Singularity data on the exceptional divisor of the X_DIR chart."""

    q_on_divisor: tuple  # coefficient list of Q(0, v)
    roots: Tuple[DivisorRoot, ...]
    origin_data: tuple  # (P(0,0), Q(0,0))
    discriminant: object

    def to_json(self) -> dict:
        return {"q_on_divisor": [float(c) for c in self.q_on_divisor],
                "roots": [r.to_json() for r in self.roots],
                "origin_data": [float(v) for v in self.origin_data],
                "discriminant": float(self.discriminant)}


def divisor_report(nf: NormalFormField) -> DivisorReport:
    """Blow up in the X_DIR chart, restrict to u = 0, classify the roots.

    For the normal-form family Q(0, v) = -v^2 + (b-a) v + c - 1 exactly
    and its discriminant equals -d; both facts are asserted here.
    """
    inv = invariants(nf)
    res = blow_up(nf.field(), BlowupChart(ChartKind.X_DIR, 1))
    if res.u_factor is None or res.v_factor is None:
        raise NotDivisible("blowup", Poly2.zero())
    p_fac, q_fac = res.u_factor, res.v_factor
    q0 = q_fac.restrict_x0()  # Q(0, v) as a polynomial in v
    q0 = (q0 + [type(q0[0])(0)] * 3)[:3] if q0 else [Fraction(0)] * 3
    expected = [inv.c - 1, inv.b - inv.a, -1 + 0 * inv.c]
    if nf.is_float:
        assert all(abs(float(x) - float(y)) < 1e-9 for x, y in zip(q0, expected))
    else:
        assert u1.eq(list(q0), list(expected)), (q0, expected)
    disc = q0[1] * q0[1] - 4 * q0[2] * q0[0]
    assert (abs(float(disc + inv.d)) < 1e-9) if nf.is_float else (disc == -inv.d)

    p00 = p_fac.coeff(0, 0)
    q00 = q0[0]

    def eig_pair(v0):
        # eigenvalues at (0, v0): P(0, v0) along u, v0 * dQ/dv(0, v0) along v
        e1 = u1.ev(p_fac.restrict_x0(), v0)
        e2 = v0 * u1.ev(u1.deriv(list(q0)), v0)
        return e1, e2

    roots = []
    if disc > 0:
        s = sqrt_fraction(disc) if not isinstance(disc, float) else None
        rt = s if s is not None else math.sqrt(float(disc))
        half = (inv.b - inv.a) / 2
        for v0 in (half - rt / 2, half + rt / 2):
            e1, e2 = eig_pair(v0)
            roots.append(DivisorRoot(float(v0), 1, e1 != 0 or e2 != 0))
    elif disc == 0:
        v0 = (inv.b - inv.a) / 2
        e1, e2 = eig_pair(v0)
        roots.append(DivisorRoot(float(v0), 2, e1 != 0 or e2 != 0))
    return DivisorReport(tuple(q0), tuple(roots), (p00, q00), disc)


@dataclass(frozen=True)
class Rational1:
    """Univariate rational function num/den as coefficient lists."""

    num: tuple
    den: tuple

    def eval(self, t: float) -> float:
        return u1.ev(list(self.num), t) / u1.ev(list(self.den), t)

    def equals(self, other: "Rational1") -> bool:
        """Equality as rational functions (cross-multiplied, exact)."""
        return u1.eq(u1.mul(list(self.num), list(other.den)),
                     u1.mul(list(other.num), list(self.den)))

    def to_json(self) -> dict:
        def enc(cs):
            return [float(c) for c in cs]
        return {"num": enc(self.num), "den": enc(self.den)}


@dataclass(frozen=True)
class SaddleData:
    """Axis restrictions of the two directional saddles behind a fake saddle.

    The pi_plus / pi_minus pullbacks P u d/du + Q v d/dv give hyperbolic
    saddles with ratios lambda_plus = 1 - c and lambda_minus = 1/(1-c).
    The four restriction quotients r12/r21 drive the transition-map
    coefficient; each comes in a generic (pullback) and a closed-form
    variant that must agree exactly.
    """

    lambda_plus: object
    lambda_minus: object
    restrictions: Dict[str, tuple]  # eight univariate coefficient lists
    r12_minus: Rational1
    r21_minus: Rational1
    r12_plus: Rational1
    r21_plus: Rational1
    r12_minus_closed: Rational1
    r21_minus_closed: Rational1
    r12_plus_closed: Rational1
    r21_plus_closed: Rational1

    def to_json(self) -> dict:
        return {
            "lambda_plus": float(self.lambda_plus),
            "lambda_minus": float(self.lambda_minus),
            "restrictions": {k: [float(c) for c in v]
                             for k, v in self.restrictions.items()},
            "r12_minus": self.r12_minus.to_json(),
            "r21_minus": self.r21_minus.to_json(),
            "r12_plus": self.r12_plus.to_json(),
            "r21_plus": self.r21_plus.to_json(),
            "r12_minus_closed": self.r12_minus_closed.to_json(),
            "r21_minus_closed": self.r21_minus_closed.to_json(),
            "r12_plus_closed": self.r12_plus_closed.to_json(),
            "r21_plus_closed": self.r21_plus_closed.to_json(),
        }


def closed_r21_minus(a, b, c) -> Rational1:
    """Divisor restriction P2-/P1- as a rational function of (a, b, c)."""
    return Rational1((-1 + 0 * a, a - c + 2, -a + b + c - 2),
                     (1 - c, -a + b + 2 * c - 2, a - b - c + 2))


def closed_r12_plus(a, b, c) -> Rational1:
    """Divisor restriction P1+/P2+ as a rational function of (a, b, c)."""
    return Rational1((1 + 0 * a, a + c - 2, -a + b - c + 2),
                     (c - 1, -a + b - 2 * c + 2, a - b + c - 2))


def saddle_data(nf: NormalFormField) -> SaddleData:
    """Directional saddle data for a hyperbolic fake saddle (d > 0)."""
    inv = invariants(nf)
    cls = classify(inv)
    if cls.verdict is not Verdict.HYPERBOLIC_FAKE_SADDLE:
        raise NotAFakeSaddle(f"verdict {cls.verdict.value}; saddle data needs d > 0")

    fld = nf.field()
    plus = blow_up(fld, BlowupChart(ChartKind.PI_PLUS, 1))
    minus = blow_up(fld, BlowupChart(ChartKind.PI_MINUS, 1))
    if plus.u_factor is None or plus.v_factor is None \
            or minus.u_factor is None or minus.v_factor is None:
        raise NotDivisible("pi-chart factorization", Poly2.zero())
    p_plus, q_plus = plus.u_factor, plus.v_factor
    p_minus, q_minus = minus.u_factor, minus.v_factor

    # saddle fields: x' = P1 x, y' = P2 y, with the minus chart transposed
    p1m = q_minus.transpose()
    p2m = p_minus.transpose()
    p1p, p2p = p_plus, q_plus

    lam_plus = -p2p.coeff(0, 0) / p1p.coeff(0, 0)
    lam_minus = -p2m.coeff(0, 0) / p1m.coeff(0, 0)

    restr = {
        "p1_minus_x": tuple(p1m.restrict_y0()),
        "p2_minus_x": tuple(p2m.restrict_y0()),
        "p1_minus_y": tuple(p1m.restrict_x0()),
        "p2_minus_y": tuple(p2m.restrict_x0()),
        "p1_plus_x": tuple(p1p.restrict_y0()),
        "p2_plus_x": tuple(p2p.restrict_y0()),
        "p1_plus_y": tuple(p1p.restrict_x0()),
        "p2_plus_y": tuple(p2p.restrict_x0()),
    }

    r12_m = Rational1(restr["p1_minus_y"], restr["p2_minus_y"])
    r21_m = Rational1(restr["p2_minus_x"], restr["p1_minus_x"])
    r12_p = Rational1(restr["p1_plus_y"], restr["p2_plus_y"])
    r21_p = Rational1(restr["p2_plus_x"], restr["p1_plus_x"])

    a, b, c = inv.a, inv.b, inv.c
    f1x = nf.f1.restrict_y0()
    g1x = nf.g1.restrict_y0()
    f1_neg = u1.negate_var(f1x)
    g1_neg = u1.negate_var(g1x)
    r12_m_closed = Rational1(tuple(u1.sub_(g1_neg, f1_neg)), tuple(f1_neg))
    r21_p_closed = Rational1(tuple(u1.sub_(g1x, f1x)), tuple(f1x))

    return SaddleData(
        lambda_plus=lam_plus,
        lambda_minus=lam_minus,
        restrictions=restr,
        r12_minus=r12_m,
        r21_minus=r21_m,
        r12_plus=r12_p,
        r21_plus=r21_p,
        r12_minus_closed=r12_m_closed,
        r21_minus_closed=closed_r21_minus(a, b, c),
        r12_plus_closed=closed_r12_plus(a, b, c),
        r21_plus_closed=r21_p_closed,
    )


def linear_part(field: PlanarField, point) -> Tuple[Tuple[object, object], ...]:
    """Exact 2x2 Jacobian of the field at a point."""
    x0, y0 = point
    return ((field.p.diff_x().eval(x0, y0), field.p.diff_y().eval(x0, y0)),
            (field.q.diff_x().eval(x0, y0), field.q.diff_y().eval(x0, y0)))
