"""Exact arithmetic over Q and Q(s)."""
from fractions import Fraction
from unittest import mock

from django.test import SimpleTestCase

from dynamics.defaults import SIGN_MAX_BITS
from dynamics.exceptions import ContextMismatchError, MapSpecError, PrecisionLimitError, UnsupportedMapError
from dynamics.scalars import (
    ONE,
    SIGN_PRECISIONS,
    ZERO,
    Scalar,
    minimal_polynomial,
    refine_interval,
    same_real_number,
    scalar_arith,
    scalar_sign,
    solve_linear,
)

SQRT2 = {"minpoly": [-2, 0, 1], "interval": ["1", "2"]}
GOLDEN = {"minpoly": [-1, -1, 1], "interval": ["1", "2"]}


class RationalScalarTests(SimpleTestCase):
    def test_arithmetic_stays_exact(self):
        self.assertEqual(Scalar("1/2") + Scalar("1/3"), Scalar("5/6"))
        self.assertEqual(Scalar("2/3") * 3, Scalar(2))
        self.assertEqual(ONE / Scalar("5/4"), Scalar("4/5"))
        self.assertTrue(Scalar("7/2").is_rational)
        self.assertEqual(Scalar("7/2").floor(), 3)

    def test_division_by_zero(self):
        with self.assertRaises(ZeroDivisionError):
            ONE / ZERO

    def test_literal_parsing(self):
        self.assertEqual(Scalar.from_literal("0.25"), Scalar("1/4"))
        self.assertEqual(Scalar.from_literal(3), Scalar(3))
        self.assertEqual(Scalar("3/4").to_literal(), "3/4")

    def test_invalid_literal_names_the_field(self):
        with self.assertRaises(MapSpecError) as ctx:
            Scalar.from_literal("three", "branches[0].slope")
        self.assertEqual(ctx.exception.field, "branches[0].slope")
        self.assertIn("branches[0].slope", str(ctx.exception))


class AlgebraicScalarTests(SimpleTestCase):
    def setUp(self):
        self.r2 = Scalar.from_literal(SQRT2)
        self.phi = Scalar.from_literal(GOLDEN)

    def test_square_root_of_two(self):
        self.assertFalse(self.r2.is_rational)
        self.assertEqual(self.r2 * self.r2, Scalar(2))
        self.assertTrue((self.r2 * self.r2).is_rational)
        self.assertTrue(Scalar("141/100") < self.r2 < Scalar("142/100"))
        self.assertEqual(self.r2.floor(), 1)

    def test_golden_ratio_identities(self):
        self.assertEqual(self.phi * self.phi, self.phi + 1)
        self.assertEqual(ONE / self.phi, self.phi - 1)
        self.assertEqual(minimal_polynomial(self.phi), (-1, -1, 1))
        self.assertEqual(minimal_polynomial(ONE / self.phi), (-1, 1, 1))

    def test_sign_of_small_differences(self):
        tiny = self.phi - Scalar("161803398874989/100000000000000")
        self.assertEqual(tiny.sign(), 1)
        self.assertEqual((ZERO - tiny).sign(), -1)

    def test_sign_gives_up_at_the_precision_cap(self):
        tiny = self.phi - Scalar("161803398874989/100000000000000")
        with mock.patch("dynamics.scalars.SIGN_PRECISIONS", (16,)):
            with self.assertRaises(PrecisionLimitError):
                tiny.sign()
        self.assertTrue(issubclass(PrecisionLimitError, UnsupportedMapError))
        self.assertEqual(SIGN_PRECISIONS[-1], SIGN_MAX_BITS)

    def test_refine_brackets_value(self):
        lo, hi = self.r2.refine(Fraction(1, 10**12))
        self.assertLessEqual(hi - lo, Fraction(1, 10**12))
        self.assertLess(lo * lo, 2)
        self.assertGreater(hi * hi, 2)

    def test_literal_keeps_context(self):
        value = self.r2 / 2 + Scalar("1/3")
        again = Scalar.from_literal(value.to_literal())
        self.assertEqual(again, value)

    def test_mixed_fields_are_rejected(self):
        with self.assertRaises(ContextMismatchError):
            self.r2 + self.phi

    def test_interval_must_isolate_a_root(self):
        with self.assertRaises(MapSpecError):
            Scalar.from_literal({"minpoly": [-2, 0, 1], "interval": ["-2", "2"]})

    def test_reducible_minpoly_is_rejected(self):
        with self.assertRaises(MapSpecError):
            Scalar.from_literal({"minpoly": [-4, 0, 1], "interval": ["1", "3"]})

    def test_same_real_number_across_fields(self):
        other = Scalar.from_literal({"minpoly": [-1, -1, 1], "interval": ["3/2", "7/4"]})
        self.assertTrue(same_real_number(self.phi, other))
        self.assertFalse(same_real_number(self.phi, self.r2))


class ScalarFunctionTests(SimpleTestCase):
    def test_arith_by_name(self):
        phi = Scalar.from_literal(GOLDEN)
        self.assertEqual(scalar_arith(phi, phi, "mul"), phi + 1)
        self.assertEqual(scalar_arith(ONE, phi, "div"), phi - 1)
        self.assertEqual(scalar_arith(Scalar("1/2"), Scalar("1/3"), "sub"), Scalar("1/6"))
        with self.assertRaises(ValueError):
            scalar_arith(ONE, ONE, "pow")

    def test_sign_is_multiplicative(self):
        r2 = Scalar.from_literal(SQRT2)
        values = [r2 - 1, 1 - r2, ZERO, Scalar("-3/7"), r2]
        for a in values:
            for b in values:
                self.assertEqual(scalar_sign(a * b), scalar_sign(a) * scalar_sign(b))

    def test_refine_interval(self):
        phi = Scalar.from_literal(GOLDEN)
        lo, hi = refine_interval(phi, Fraction(1, 10**9))
        self.assertLessEqual(hi - lo, Fraction(1, 10**9))
        slack = Fraction(1, 10**15)
        self.assertTrue(lo - slack <= Fraction(1.618033988749895) <= hi + slack)
        self.assertEqual(refine_interval(Scalar("2/3"), Fraction(1, 10)), (Fraction(2, 3), Fraction(2, 3)))
        with self.assertRaises(ValueError):
            refine_interval(phi, Fraction(0))


class LinearAlgebraTests(SimpleTestCase):
    def test_solve_over_a_number_field(self):
        phi = Scalar.from_literal(GOLDEN)
        # phi x + y = phi^2, x - y = 0
        solution = solve_linear([[phi, ONE], [ONE, -ONE]], [phi * phi, ZERO])
        self.assertEqual(solution, [phi * phi / (phi + 1), phi * phi / (phi + 1)])
        self.assertEqual(solution[0], ONE)

    def test_inconsistent_system(self):
        self.assertIsNone(solve_linear([[1, 1], [2, 2]], [1, 3]))
