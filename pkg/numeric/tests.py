from fractions import Fraction

from django.test import SimpleTestCase, override_settings
from hypothesis import given, strategies as st

from numeric.bounds import (
    Interval,
    L_interval,
    decide,
    iroot,
    ln2_interval,
    ln_interval,
    log2_interval,
    power_interval,
)
from numeric.exceptions import BackendMismatch, DivisionByZero, DomainError, ParameterError
from numeric.scalars import (
    Tolerance,
    add,
    canonical,
    collide,
    div,
    format_scalar,
    merge_collisions,
    mul,
    parse_scalar,
)

rationals = st.fractions(max_denominator=1000).map(canonical)


class ScalarArithmeticTests(SimpleTestCase):
    def test_exact_sum_is_reduced(self):
        self.assertEqual(add(Fraction(1, 2), Fraction(1, 3)), Fraction(5, 6))
        self.assertEqual(add(Fraction(2, 4), 0), Fraction(1, 2))

    def test_inverse_pair_collapses_to_int(self):
        product = mul(Fraction(2, 3), Fraction(3, 2))
        self.assertEqual(product, 1)
        self.assertIs(type(product), int)

    def test_division(self):
        self.assertEqual(div(6, 4), Fraction(3, 2))
        with self.assertRaisesMessage(DivisionByZero, "divisor of 5 is 0"):
            div(5, 0)

    def test_tolerant_division_by_near_zero(self):
        with self.assertRaises(DivisionByZero):
            div(1.0, 1e-12, Tolerance(1e-9))

    def test_backend_mismatch(self):
        with self.assertRaises(BackendMismatch):
            add(1, 1.0)

    def test_non_finite_floats_are_rejected(self):
        with self.assertRaises(DomainError):
            canonical(float("inf"))

    def test_negative_tolerance_rejected(self):
        with self.assertRaises(ParameterError):
            Tolerance(-1)

    @given(rationals, rationals, rationals)
    def test_exact_backend_is_a_field(self, a, b, c):
        self.assertEqual(add(add(a, b), c), add(a, add(b, c)))
        self.assertEqual(mul(a, b), mul(b, a))
        self.assertEqual(mul(a, add(b, c)), add(mul(a, b), mul(a, c)))

    @given(rationals, st.integers(min_value=1, max_value=50))
    def test_equal_rationals_share_one_representation(self, a, k):
        scaled = canonical(Fraction(a) * k / k)
        self.assertIs(type(scaled), type(a))
        self.assertEqual(format_scalar(scaled), format_scalar(a))


class CollisionTests(SimpleTestCase):
    def test_below_and_above_tolerance(self):
        tol = Tolerance(1e-9)
        self.assertTrue(collide(1.0, 1.0 + 1e-12, tol))
        self.assertFalse(collide(1.0, 1.01, tol))

    @given(st.floats(allow_nan=False, allow_infinity=False), st.floats(allow_nan=False, allow_infinity=False))
    def test_reflexive_and_symmetric(self, a, b):
        tol = Tolerance(1e-9)
        self.assertTrue(collide(a, a, tol))
        self.assertEqual(collide(a, b, tol), collide(b, a, tol))

    def test_exact_values_cannot_collide(self):
        with self.assertRaises(BackendMismatch):
            collide(1, 1.0)

    def test_merge_chains_adjacent_values(self):
        groups = merge_collisions([2.0, 1.0 + 1e-12, 1.0], Tolerance(1e-9))
        self.assertEqual([g[0] for g in groups], [1.0, 2.0])
        self.assertEqual(len(groups[0]), 2)


class ScalarTextTests(SimpleTestCase):
    def test_parse(self):
        self.assertEqual(parse_scalar("3/6"), Fraction(1, 2))
        self.assertEqual(parse_scalar("-4/2"), -2)
        self.assertEqual(parse_scalar(" 7 "), 7)
        self.assertEqual(parse_scalar("0.5"), 0.5)
        with self.assertRaises(DivisionByZero):
            parse_scalar("1/0")
        with self.assertRaises(ParameterError):
            parse_scalar("abc")

    def test_format(self):
        self.assertEqual(format_scalar(Fraction(-14, 19)), "-14/19")
        self.assertEqual(format_scalar(Fraction(4, 2)), "2")
        self.assertEqual(format_scalar(0.1), "0.1")


class EnclosureTests(SimpleTestCase):
    def test_iroot(self):
        self.assertEqual(iroot(27, 3), (3, True))
        self.assertEqual(iroot(28, 3), (3, False))
        self.assertEqual(iroot(2**200, 5), (2**40, True))
        self.assertEqual(iroot(0, 4), (0, True))

    @given(st.integers(min_value=0, max_value=10**30), st.integers(min_value=1, max_value=9))
    def test_iroot_is_floor(self, n, q):
        root, exact = iroot(n, q)
        self.assertLessEqual(root**q, n)
        self.assertGreater((root + 1) ** q, n)
        self.assertEqual(exact, root**q == n)

    def test_power_is_exact_on_perfect_powers(self):
        self.assertEqual(power_interval(4, Fraction(3, 2), 64), Interval.point(8))
        self.assertEqual(power_interval(Fraction(9, 4), Fraction(1, 2), 64), Interval.point(Fraction(3, 2)))

    def test_power_encloses_irrational_value(self):
        enclosure = power_interval(2, Fraction(1, 2), 1024)
        self.assertLessEqual(enclosure.lo**2, 2)
        self.assertGreaterEqual(enclosure.hi**2, 2)
        self.assertLess(enclosure.width, Fraction(1, 1000))

    def test_log2(self):
        self.assertEqual(log2_interval(8, 64), Interval.point(3))
        self.assertEqual(log2_interval(Fraction(1, 4), 64), Interval.point(-2))
        enclosure = log2_interval(3, 256)
        self.assertTrue(enclosure.lo < Fraction(15850, 10000) < enclosure.hi)

    def test_L_is_at_least_one(self):
        self.assertEqual(L_interval(1, 64), Interval.point(1))
        self.assertEqual(L_interval(2, 64), Interval.point(1))
        self.assertEqual(L_interval(64, 64), Interval.point(6))

    def test_ln2_brackets_known_value(self):
        enclosure = ln2_interval(1024)
        self.assertLess(enclosure.lo, Fraction(6931471, 10**7))
        self.assertGreater(enclosure.hi, Fraction(6931472, 10**7))
        self.assertLess(enclosure.width, Fraction(1, 1000))

    def test_ln_of_fraction_below_one_is_negative(self):
        self.assertLess(ln_interval(Fraction(1, 2), 256).hi, 0)

    def test_interval_division_by_zero(self):
        with self.assertRaises(DivisionByZero):
            Interval(1, 2) / Interval(-1, 1)


class DecideTests(SimpleTestCase):
    def test_exact_comparisons(self):
        self.assertTrue(decide(3, 3, "le").holds)
        self.assertFalse(decide(3, 3, "lt").holds)
        self.assertTrue(decide(Fraction(1, 3), Fraction(1, 2), "lt").holds)
        self.assertTrue(decide(5, 4, "gt").holds)

    def test_irrational_comparison_refines(self):
        sqrt2 = lambda m: power_interval(2, Fraction(1, 2), m)
        decision = decide(sqrt2, Fraction(14142136, 10**7), "lt")
        self.assertTrue(decision.holds)
        self.assertGreaterEqual(decision.precision, 64)

    @override_settings(ENERGYLAB_MAX_PRECISION=64)
    def test_undecided_is_reported(self):
        sqrt2 = lambda m: power_interval(2, Fraction(1, 2), m)
        decision = decide(sqrt2, Fraction(1414213562373095, 10**15), "le")
        self.assertIsNone(decision.holds)

    def test_unknown_relation(self):
        with self.assertRaises(ParameterError):
            decide(1, 2, "ne")
