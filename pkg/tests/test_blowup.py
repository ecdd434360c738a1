from fractions import Fraction

import pytest

from conftest import random_normal_form
from fakesaddle.blowup import (BlowupChart, ChartKind, NotAFakeSaddle,
                               Rational1, UnsupportedChart, blow_up,
                               closed_r12_plus, closed_r21_minus,
                               divisor_report, linear_part, saddle_data)
from fakesaddle.casebook import build_example6, build_xn, build_z, \
    printed_z_blowup
from fakesaddle.normalform import invariants
from fakesaddle.polyfield import PlanarField, Poly2

U, V = Poly2.gens()


class TestBlowUp:
    def test_degenerate_quartic_swapped_chart(self):
        res = blow_up(build_xn(4), BlowupChart(ChartKind.X_DIR_SWAPPED, 1))
        assert res.field.p == (-(U + 1) ** 2 + U ** 3 * V ** 2) * U
        assert res.field.q == (U + 1) ** 2 * V
        assert res.u_factor == -(U + 1) ** 2 + U ** 3 * V ** 2
        assert res.v_factor == (U + 1) ** 2

    def test_quartic_family_chart(self):
        alpha, beta = Fraction(3, 2), Fraction(5)
        res = blow_up(build_z(alpha, beta),
                      BlowupChart(ChartKind.X_DIR_SWAPPED, 2))
        printed = printed_z_blowup(alpha, beta)
        assert res.field.p == printed.p
        assert res.field.q == printed.q

    def test_radial_field(self):
        res = blow_up(PlanarField(U, V), BlowupChart(ChartKind.X_DIR, 0))
        assert res.field.p == U
        assert res.field.q == Poly2.zero()

    def test_unsupported_chart(self):
        with pytest.raises(UnsupportedChart):
            BlowupChart("weighted", 1).substitution()


class TestDivisorReport:
    def test_no_real_roots_when_d_positive(self):
        rep = divisor_report(build_example6(Fraction(1), Fraction(-1),
                                            Fraction(-1)))
        assert rep.roots == ()
        assert rep.discriminant == -4
        assert rep.origin_data == (1, -2)

    def test_double_root_at_origin_for_semi_hyperbolic(self):
        rep = divisor_report(build_example6(Fraction(0), Fraction(0),
                                            Fraction(1)))
        assert len(rep.roots) == 1
        assert rep.roots[0].location == 0.0
        assert rep.roots[0].multiplicity == 2

    def test_fully_degenerate_double_point(self):
        rep = divisor_report(build_example6(Fraction(2), Fraction(0),
                                            Fraction(0)))
        (root,) = rep.roots
        assert root.location == -1.0
        assert root.multiplicity == 2
        assert not root.nonzero_eigenvalue

    def test_origin_unit_radial_coefficient(self, rng):
        for _ in range(30):
            nf = random_normal_form(rng)
            assert divisor_report(nf).origin_data[0] == 1

    def test_discriminant_is_minus_d(self, rng):
        for _ in range(50):
            nf = random_normal_form(rng)
            assert divisor_report(nf).discriminant == -invariants(nf).d


class TestSaddleData:
    def test_hyperbolicity_ratios(self, rng):
        for _ in range(20):
            nf = random_normal_form(rng, d_positive=True)
            sd = saddle_data(nf)
            c = invariants(nf).c
            assert sd.lambda_plus == 1 - c
            assert sd.lambda_minus == 1 / (1 - c)
            assert sd.lambda_plus * sd.lambda_minus == 1

    def test_restriction_values_at_origin(self, rng):
        # the two transported quotients start at -1/ratio on each side
        for _ in range(15):
            nf = random_normal_form(rng, d_positive=True)
            sd = saddle_data(nf)
            lam_m = sd.lambda_minus
            assert sd.r21_minus.eval(0.0) == pytest.approx(-float(lam_m))
            assert sd.r12_plus.eval(0.0) == pytest.approx(
                -1.0 / float(sd.lambda_plus))

    def test_symmetric_case_constant_quotient(self):
        nf = build_example6(Fraction(0), Fraction(0), Fraction(0))
        sd = saddle_data(nf)
        # r12_plus is identically -1: numerator + denominator = 0
        total = [a + b for a, b in zip(sd.r12_plus_closed.num,
                                       sd.r12_plus_closed.den)]
        assert all(v == 0 for v in total)
        assert sd.r12_plus.equals(sd.r12_plus_closed)

    def test_pure_quadratic_fiber_quotient(self):
        c = Fraction(1, 2)
        nf = build_example6(Fraction(0), Fraction(0), c)
        sd = saddle_data(nf)
        # g1/f1 - 1 with constant g1 = c and f1 = 1 is the constant c - 1
        assert sd.r21_plus.equals(Rational1((c - 1,), (Fraction(1),)))

    def test_closed_forms_match_generic_pullback(self, rng):
        for _ in range(200):
            nf = random_normal_form(rng, d_positive=True)
            a, b, c = (invariants(nf).a, invariants(nf).b, invariants(nf).c)
            sd = saddle_data(nf)
            assert sd.r21_minus.equals(closed_r21_minus(a, b, c))
            assert sd.r12_plus.equals(closed_r12_plus(a, b, c))
            assert sd.r12_minus.equals(sd.r12_minus_closed)
            assert sd.r21_plus.equals(sd.r21_plus_closed)

    def test_rejects_non_hyperbolic(self):
        with pytest.raises(NotAFakeSaddle):
            saddle_data(build_example6(Fraction(0), Fraction(0), Fraction(2)))

    def test_float_mode_ratios_toleranced(self):
        from fakesaddle.casebook import build_z_normalform
        nf = build_z_normalform(1.0, 1.0)  # irrational rescale: float mode
        sd = saddle_data(nf)
        assert abs(sd.lambda_plus * sd.lambda_minus - 1.0) < 1e-14
        a, b, c = (float(v) for v in (invariants(nf).a, invariants(nf).b,
                                      invariants(nf).c))
        closed = closed_r12_plus(a, b, c)
        for t in (0.0, 0.25, 0.7):
            assert sd.r12_plus.eval(t) == pytest.approx(closed.eval(t),
                                                        rel=1e-12)


class TestLinearPart:
    def test_exact_jacobian(self):
        field = PlanarField(U ** 2 - V, U * V)
        lp = linear_part(field, (Fraction(1), Fraction(2)))
        assert lp == ((2, -1), (2, 1))


class TestSerialization:
    def test_divisor_report_json(self):
        rep = divisor_report(build_example6(Fraction(2), Fraction(0),
                                            Fraction(0)))
        data = rep.to_json()
        assert data["q_on_divisor"] == [-1.0, -2.0, -1.0]
        assert data["roots"][0] == {"location": -1.0, "multiplicity": 2,
                                    "nonzero_eigenvalue": False}
        assert data["origin_data"] == [1.0, -1.0]

    def test_saddle_data_json(self, rng):
        sd = saddle_data(random_normal_form(rng, d_positive=True))
        data = sd.to_json()
        assert set(data["r12_plus"]) == {"num", "den"}
        assert len(data["restrictions"]) == 8
        assert data["lambda_plus"] * data["lambda_minus"] == pytest.approx(1.0)
