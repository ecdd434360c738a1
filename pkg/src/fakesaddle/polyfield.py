"""Exact sparse bivariate polynomials and planar polynomial vector fields.

Coefficients are exact rationals (Fraction) by default.  A parallel
float-coefficient mode exists solely for irrational coordinate
rescalings; any operation touching a float-mode value yields a
float-mode result, and ``is_float`` flags every derived object so tests
know which comparisons must be exact and which are toleranced.

All values are immutable after construction and every operation is a
pure function, so everything here is safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Tuple, Union

Coeff = Union[Fraction, float]
Exponents = Tuple[int, int]

NEG_INF = float("-inf")


class NonMonomialDenominator(Exception):
    """Chain-rule denominator (det of the Jacobian) is not a monomial."""


class NotDivisible(Exception):
    """Exact polynomial division failed; carries the offending remainder."""

    def __init__(self, component: str, remainder: "Poly2"):
        self.component = component
        self.remainder = remainder
        super().__init__(
            f"component {component!r} is not divisible; remainder {remainder}"
        )


class SingularMap(Exception):
    """Affine coordinate change with zero determinant."""


def _coerce(c) -> Coeff:
    if isinstance(c, float):
        return c
    return Fraction(c)


class Poly2:
    """Sparse bivariate polynomial: {(i, j): coeff} for x^i * y^j.

    No zero coefficients are stored; the zero polynomial has an empty
    term map and degree -inf.  If any coefficient is a float the whole
    polynomial is held in float mode.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Exponents, Coeff] | None = None):
        clean: Dict[Exponents, Coeff] = {}
        float_mode = False
        if terms:
            for (i, j), c in terms.items():
                i, j = int(i), int(j)
                if i < 0 or j < 0:
                    raise ValueError(f"negative exponent ({i},{j})")
                c = _coerce(c)
                if c == 0:
                    continue
                if isinstance(c, float):
                    float_mode = True
                clean[(i, j)] = c
        if float_mode:
            clean = {k: float(v) for k, v in clean.items()}
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls) -> "Poly2":
        return cls()

    @classmethod
    def const(cls, c) -> "Poly2":
        return cls({(0, 0): c})

    @classmethod
    def gens(cls) -> Tuple["Poly2", "Poly2"]:
        """The two coordinate polynomials (x, y)."""
        return cls({(1, 0): 1}), cls({(0, 1): 1})

    @classmethod
    def from_univariate(cls, coeffs, var: int = 0) -> "Poly2":
        """Lift a coefficient list c0 + c1 t + ... into variable 0 or 1."""
        if var == 0:
            return cls({(k, 0): c for k, c in enumerate(coeffs)})
        return cls({(0, k): c for k, c in enumerate(coeffs)})

    # -- basic queries ---------------------------------------------------

    @property
    def is_float(self) -> bool:
        return any(isinstance(c, float) for c in self.terms.values())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self):
        if not self.terms:
            return NEG_INF
        return max(i + j for i, j in self.terms)

    def coeff(self, i: int, j: int) -> Coeff:
        return self.terms.get((i, j), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def to_float(self) -> "Poly2":
        return Poly2({k: float(v) for k, v in self.terms.items()})

    # -- arithmetic -------------------------------------------------------

    def _as_poly(self, other) -> "Poly2":
        if isinstance(other, Poly2):
            return other
        return Poly2.const(other)

    def __add__(self, other) -> "Poly2":
        other = self._as_poly(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return Poly2(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly2":
        return Poly2({k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "Poly2":
        return self + (-self._as_poly(other))

    def __rsub__(self, other) -> "Poly2":
        return self._as_poly(other) + (-self)

    def __mul__(self, other) -> "Poly2":
        other = self._as_poly(other)
        out: Dict[Exponents, Coeff] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, 0) + c1 * c2
        return Poly2(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly2":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly2.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly2):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- evaluation and calculus ------------------------------------------

    def eval(self, x, y):
        """Exact on rational points, float otherwise."""
        total = 0
        powx: Dict[int, object] = {0: 1}
        powy: Dict[int, object] = {0: 1}

        def p(cache, base, n):
            if n not in cache:
                cache[n] = p(cache, base, n - 1) * base
            return cache[n]

        for (i, j), c in self.terms.items():
            total += c * p(powx, x, i) * p(powy, y, j)
        return total

    def __call__(self, x, y):
        return self.eval(x, y)

    def diff_x(self) -> "Poly2":
        return Poly2({(i - 1, j): i * c
                      for (i, j), c in self.terms.items() if i > 0})

    def diff_y(self) -> "Poly2":
        return Poly2({(i, j - 1): j * c
                      for (i, j), c in self.terms.items() if j > 0})

    def subs(self, px: "Poly2", py: "Poly2") -> "Poly2":
        """Polynomial composition p(px(u,v), py(u,v))."""
        powx: Dict[int, Poly2] = {0: Poly2.const(1)}
        powy: Dict[int, Poly2] = {0: Poly2.const(1)}

        def p(cache, base, n):
            if n not in cache:
                cache[n] = p(cache, base, n - 1) * base
            return cache[n]

        out = Poly2.zero()
        for (i, j), c in self.terms.items():
            out = out + p(powx, px, i) * p(powy, py, j) * c
        return out

    def transpose(self) -> "Poly2":
        """Swap the two variables."""
        return Poly2({(j, i): c for (i, j), c in self.terms.items()})

    def shift_mul(self, di: int, dj: int, c=1) -> "Poly2":
        return Poly2({(i + di, j + dj): v * c for (i, j), v in self.terms.items()})

    def restrict_y0(self):
        """Coefficient list of p(x, 0)."""
        n = max((i for (i, j) in self.terms if j == 0), default=-1)
        out = [Fraction(0)] * (n + 1)
        for (i, j), c in self.terms.items():
            if j == 0:
                out[i] = c
        if self.is_float:
            out = [float(v) for v in out]
        return out

    def restrict_x0(self):
        """Coefficient list of p(0, y)."""
        n = max((j for (i, j) in self.terms if i == 0), default=-1)
        out = [Fraction(0)] * (n + 1)
        for (i, j), c in self.terms.items():
            if i == 0:
                out[j] = c
        if self.is_float:
            out = [float(v) for v in out]
        return out

    # -- division ----------------------------------------------------------

    def _grlex_leading(self) -> Exponents:
        return max(self.terms, key=lambda k: (k[0] + k[1], k[0]))

    def divide_exact(self, divisor: "Poly2") -> "Poly2":
        """Exact quotient self / divisor; raises NotDivisible otherwise."""
        if divisor.is_zero:
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero:
            return Poly2.zero()
        # fast path: monomial divisor
        if divisor.is_monomial():
            ((di, dj), dc), = divisor.terms.items()
            out = {}
            rem = {}
            for (i, j), c in self.terms.items():
                if i >= di and j >= dj:
                    out[(i - di, j - dj)] = c / dc
                else:
                    rem[(i, j)] = c
            if rem:
                raise NotDivisible("poly", Poly2(rem))
            return Poly2(out)
        quot: Dict[Exponents, Coeff] = {}
        rem: Dict[Exponents, Coeff] = {}
        r = self
        lead = divisor._grlex_leading()
        lc = divisor.terms[lead]
        while not r.is_zero:
            t = r._grlex_leading()
            c = r.terms[t]
            if t[0] >= lead[0] and t[1] >= lead[1]:
                m = (t[0] - lead[0], t[1] - lead[1])
                f = c / lc
                quot[m] = quot.get(m, 0) + f
                r = r - divisor.shift_mul(m[0], m[1], f)
            else:
                rem[t] = c
                r = r - Poly2({t: c})
        if rem:
            raise NotDivisible("poly", Poly2(rem))
        return Poly2(quot)

    # -- serialization / display -------------------------------------------

    def to_json(self) -> dict:
        entries = sorted(self.terms.items())
        if self.is_float:
            return {"terms": [[i, j, float(c)] for (i, j), c in entries],
                    "mode": "float"}
        return {"terms": [[i, j, f"{c.numerator}/{c.denominator}"]
                          for (i, j), c in entries]}

    @classmethod
    def from_json(cls, data: dict) -> "Poly2":
        terms = {}
        float_mode = data.get("mode") == "float"
        for i, j, c in data.get("terms", []):
            terms[(int(i), int(j))] = float(c) if float_mode else Fraction(c)
        return cls(terms)

    def __repr__(self):
        if not self.terms:
            return "Poly2(0)"

        def fmt(i, j, c):
            mono = ""
            if i:
                mono += "x" + (f"^{i}" if i > 1 else "")
            if j:
                mono += ("*" if mono else "") + "y" + (f"^{j}" if j > 1 else "")
            cs = str(c)
            if mono and c == 1:
                return mono
            if mono and c == -1:
                return f"-{mono}"
            return f"{cs}*{mono}" if mono else cs

        parts = [fmt(i, j, c) for (i, j), c in sorted(self.terms.items())]
        return "Poly2(" + " + ".join(parts).replace("+ -", "- ") + ")"

    # -- float compilation ---------------------------------------------------

    def as_float_fn(self) -> Callable[[float, float], float]:
        """Compile to a fast float evaluator (nested Horner)."""
        return _compile_horner_pair(self, None)


def _horner_expr(poly: Poly2) -> str:
    if poly.is_zero:
        return "0.0"
    imax = max(i for i, _ in poly.terms)
    jmax = max(j for _, j in poly.terms)
    grid = [[0.0] * (imax + 1) for _ in range(jmax + 1)]
    for (i, j), c in poly.terms.items():
        grid[j][i] = float(c)

    def row(cs):
        expr = repr(cs[-1])
        for c in reversed(cs[:-1]):
            expr = f"({c!r}+x*{expr})"
        return expr

    expr = row(grid[jmax])
    for j in range(jmax - 1, -1, -1):
        expr = f"({row(grid[j])}+y*{expr})"
    return expr


def _compile_horner_pair(p: Poly2, q: Poly2 | None):
    if q is None:
        src = f"def _f(x, y):\n    return {_horner_expr(p)}\n"
    else:
        src = (f"def _f(x, y):\n"
               f"    return ({_horner_expr(p)}, {_horner_expr(q)})\n")
    ns: dict = {}
    exec(src, ns)  # noqa: S102 - codegen over trusted numeric literals
    return ns["_f"]


@dataclass(frozen=True)
class PlanarField:
    """Planar vector field p(x,y) d/dx + q(x,y) d/dy.

    ``denom``, when present, is a shared monomial denominator: the field
    is (p/denom, q/denom) held exactly because the chain-rule division
    was not polynomial-exact.
    """

    p: Poly2
    q: Poly2
    denom: Poly2 | None = None

    def __post_init__(self):
        if self.denom is not None and not self.denom.is_monomial():
            raise NonMonomialDenominator(f"denominator {self.denom} not a monomial")

    @property
    def is_float(self) -> bool:
        return self.p.is_float or self.q.is_float

    def eval(self, x, y):
        px, qx = self.p.eval(x, y), self.q.eval(x, y)
        if self.denom is not None:
            d = self.denom.eval(x, y)
            return px / d, qx / d
        return px, qx

    def as_rhs(self) -> Callable[[float, float], Tuple[float, float]]:
        """Compiled float evaluator returning (p, q); requires denom None."""
        if self.denom is not None:
            raise ValueError("cannot compile a field with a pending denominator")
        return _compile_horner_pair(self.p, self.q)

    def to_json(self) -> dict:
        out = {"p": self.p.to_json(), "q": self.q.to_json()}
        if self.denom is not None:
            out["denom"] = self.denom.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PlanarField":
        denom = Poly2.from_json(data["denom"]) if "denom" in data else None
        return cls(Poly2.from_json(data["p"]), Poly2.from_json(data["q"]), denom)


@dataclass(frozen=True)
class AffineMap2:
    """Affine coordinate change (x, y) = L*(u, v) + t with invertible L."""

    m11: Coeff
    m12: Coeff
    m21: Coeff
    m22: Coeff
    t1: Coeff = 0
    t2: Coeff = 0

    def __post_init__(self):
        for name in ("m11", "m12", "m21", "m22", "t1", "t2"):
            object.__setattr__(self, name, _coerce(getattr(self, name)))

    @classmethod
    def scaling(cls, sx, sy) -> "AffineMap2":
        return cls(sx, 0, 0, sy)

    @classmethod
    def translation(cls, tx, ty) -> "AffineMap2":
        return cls(1, 0, 0, 1, tx, ty)

    @property
    def det(self) -> Coeff:
        return self.m11 * self.m22 - self.m12 * self.m21

    @property
    def is_float(self) -> bool:
        return any(isinstance(getattr(self, n), float)
                   for n in ("m11", "m12", "m21", "m22", "t1", "t2"))

    def inverse(self) -> "AffineMap2":
        d = self.det
        if d == 0:
            raise SingularMap("affine map has zero determinant")
        i11, i12 = self.m22 / d, -self.m12 / d
        i21, i22 = -self.m21 / d, self.m11 / d
        return AffineMap2(i11, i12, i21, i22,
                          -(i11 * self.t1 + i12 * self.t2),
                          -(i21 * self.t1 + i22 * self.t2))

    def as_polys(self) -> Tuple[Poly2, Poly2]:
        return (Poly2({(1, 0): self.m11, (0, 1): self.m12, (0, 0): self.t1}),
                Poly2({(1, 0): self.m21, (0, 1): self.m22, (0, 0): self.t2}))


# -- field operations ---------------------------------------------------------


def substitute(field: PlanarField, sub_x: Poly2, sub_y: Poly2) -> PlanarField:
    """Pull back a field under (x, y) = (sub_x(u,v), sub_y(u,v)).

    Solves the chain rule (xdot, ydot) = J (udot, vdot).  The det(J)
    division is performed exactly when possible; otherwise the result
    carries det(J) as a shared monomial denominator.  Non-monomial
    determinants are rejected: all charts used here are polynomial
    blow-up charts with monomial Jacobian determinant.
    """
    j11, j12 = sub_x.diff_x(), sub_x.diff_y()
    j21, j22 = sub_y.diff_x(), sub_y.diff_y()
    det = j11 * j22 - j12 * j21
    if det.is_zero:
        raise SingularMap("substitution has identically singular Jacobian")
    if not det.is_monomial():
        raise NonMonomialDenominator(f"det J = {det} is not a monomial")
    p_sub = field.p.subs(sub_x, sub_y)
    q_sub = field.q.subs(sub_x, sub_y)
    num_u = j22 * p_sub - j12 * q_sub
    num_v = j11 * q_sub - j21 * p_sub
    try:
        return PlanarField(num_u.divide_exact(det), num_v.divide_exact(det))
    except NotDivisible:
        return PlanarField(num_u, num_v, denom=det)


def divide_exact(field: PlanarField, divisor: Poly2, power: int) -> PlanarField:
    """Componentwise exact quotient by divisor**power.

    A NotDivisible error signals a wrong chart or power choice and
    reports the offending component with its remainder.
    """
    if power < 0:
        raise ValueError("power must be nonnegative")
    if power == 0:
        return field
    d = divisor ** power
    try:
        p = field.p.divide_exact(d)
    except NotDivisible as e:
        raise NotDivisible("p", e.remainder) from None
    try:
        q = field.q.divide_exact(d)
    except NotDivisible as e:
        raise NotDivisible("q", e.remainder) from None
    return PlanarField(p, q, denom=field.denom)


def pullback_affine(field: PlanarField, amap: AffineMap2) -> PlanarField:
    """Conjugate the field by an affine coordinate change.

    Irrational scale factors enter as floats; the result is then in
    float-coefficient mode (see PlanarField.is_float).
    """
    inv = amap.inverse()  # raises SingularMap
    sx, sy = amap.as_polys()
    p_sub = field.p.subs(sx, sy)
    q_sub = field.q.subs(sx, sy)
    return PlanarField(p_sub * inv.m11 + q_sub * inv.m12,
                       p_sub * inv.m21 + q_sub * inv.m22,
                       denom=field.denom)
