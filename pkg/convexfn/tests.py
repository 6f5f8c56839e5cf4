import math
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, strategies as st

from convexfn.checks import classify_slopes, divided_differences, validate_strict
from convexfn.registry import ConvexFn, Kind, inverse, parse_function
from numeric.exceptions import DomainError, ParameterError
from setcore.sets import from_values

SPECS = ["square", "cube+", "pow:3/2", "pow:5/2", "exp", "recip+", "sqrt", "cbrt", "log", "root:3", "neg:square", "inv:exp"]


class EvaluateTests(SimpleTestCase):
    def test_exact_values(self):
        self.assertEqual(parse_function("square").evaluate(Fraction(3, 2)), Fraction(9, 4))
        self.assertEqual(parse_function("recip+").evaluate(2), Fraction(1, 2))
        self.assertEqual(parse_function("pow:3/2").evaluate(4), 8)
        self.assertEqual(parse_function("cube+").evaluate(3), 27)

    def test_irrational_power_falls_back_to_float(self):
        value = parse_function("pow:3/2").evaluate(2)
        self.assertIsInstance(value, float)
        self.assertAlmostEqual(value, 2**1.5)

    def test_transcendental_values_are_tolerant(self):
        self.assertIsInstance(parse_function("exp").evaluate(0), float)
        self.assertAlmostEqual(parse_function("log").evaluate(math.e), 1.0)

    def test_domain_errors(self):
        with self.assertRaises(DomainError):
            parse_function("log").evaluate(0)
        with self.assertRaises(DomainError):
            parse_function("square").evaluate(-1)
        with self.assertRaises(DomainError):
            parse_function("recip+").evaluate(0)

    def test_negation(self):
        f = parse_function("neg:square")
        self.assertEqual(f.evaluate(3), -9)
        self.assertEqual(f.kind, Kind.CONCAVE)
        self.assertFalse(f.increasing)


class ParseTests(SimpleTestCase):
    def test_round_trip_of_spec_strings(self):
        for spec in [s for s in SPECS if s != "inv:exp"] + ["inv:neg:pow:7/3"]:
            self.assertEqual(str(parse_function(spec)), spec)

    def test_inverse_of_a_base_function_is_named(self):
        self.assertEqual(parse_function("inv:exp"), parse_function("log"))
        self.assertEqual(parse_function("inv:inv:cube+"), parse_function("cube+"))

    def test_rejects_bad_specs(self):
        for spec in ["cube", "pow", "pow:1", "pow:1/2", "square:2", "inv:", "neg:foo"]:
            with self.assertRaises(ParameterError, msg=spec):
                parse_function(spec)


class InverseTests(SimpleTestCase):
    def test_named_inverses(self):
        self.assertEqual(inverse(parse_function("exp")), parse_function("log"))
        self.assertEqual(inverse(parse_function("square")), parse_function("sqrt"))
        self.assertEqual(inverse(parse_function("pow:3/2")), ConvexFn("root", Fraction(3, 2)))
        self.assertEqual(inverse(parse_function("recip+")), parse_function("recip+"))

    def test_sqrt_is_concave(self):
        self.assertEqual(inverse(parse_function("square")).kind, Kind.CONCAVE)

    def test_involution(self):
        for spec in SPECS + ["inv:square", "neg:exp"]:
            f = parse_function(spec)
            self.assertEqual(inverse(inverse(f)), f, msg=spec)

    def test_inverse_undoes_function(self):
        for spec, x in [("square", 5), ("pow:3/2", 9), ("recip+", Fraction(2, 7)), ("neg:cube+", 2)]:
            f = parse_function(spec)
            self.assertEqual(inverse(f).evaluate(f.evaluate(x)), x, msg=spec)

    def test_inverse_of_negation_flips_kind_by_monotonicity(self):
        g = inverse(parse_function("neg:square"))
        self.assertEqual(str(g), "inv:neg:square")
        self.assertEqual(g.kind, Kind.CONCAVE)
        self.assertEqual(g.evaluate(-9), 3)


class ValidateStrictTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(validate_strict(parse_function("square"), from_values([1, 2, 3])), Kind.CONVEX)
        self.assertEqual(validate_strict(parse_function("log"), from_values([1, 2, 4])), Kind.CONCAVE)

    def test_affine_map_is_neither(self):
        xs = [Fraction(x) for x in (0, 1, 3)]
        self.assertEqual(classify_slopes(divided_differences(xs, [2 * x + 1 for x in xs])), Kind.NEITHER)

    def test_needs_three_points(self):
        with self.assertRaises(ParameterError):
            validate_strict(parse_function("square"), from_values([1, 2]))

    @given(
        st.sampled_from(SPECS),
        st.lists(st.integers(min_value=1, max_value=30), min_size=3, max_size=8, unique=True),
    )
    def test_registered_kind_matches_observed_kind(self, spec, values):
        f = parse_function(spec)
        X = from_values(values)
        self.assertEqual(validate_strict(f, X), f.kind)
