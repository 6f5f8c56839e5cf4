import random
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings as hypothesis_settings, strategies as st

from claims.balance import ExponentBound, balance_exponents, parse_bound, specialise_exponent
from claims.checks import ClaimId, ClaimInputs, ClaimReport, Condition, PassMode, check
from claims.popular import (
    equiv_classes,
    popular_set,
    popularity_threshold,
    refined_set,
    refined_size_holds,
    solution_keys,
)
from claims.scan import check_sizes, fit_slope, scan
from convexfn.registry import parse_function
from energy.services import energy
from generators.families import generate, parse_family
from incidence.services import ratio_quadruple_oracle
from numeric.exceptions import ParameterError, SideConditionViolation
from regularize.decomp import decomp
from setcore.ops import SetOp, combine
from setcore.sets import EMPTY, from_values, image

small_sets = st.lists(st.integers(min_value=-25, max_value=25), min_size=1, max_size=8).map(from_values)


def S(*values):
    return from_values(values)


def family(text, n):
    return generate(parse_family(text), n)


def seeded_set(rng, size, low=-40, high=40, zero=True):
    pool = [x for x in range(low, high + 1) if zero or x]
    return from_values(rng.sample(pool, size))


class PopularSetTests(SimpleTestCase):
    def test_two_point_sets(self):
        # 2 * 2 / (L(2) * |{0, 1, 2}|) = 4/3, so only the middle sum is popular
        A = S(0, 1)
        self.assertEqual(popularity_threshold(2, 2, 3), 2)
        self.assertEqual(popular_set(A, A), S(1))

    def test_threshold_floors_at_one(self):
        self.assertEqual(popularity_threshold(2, 1, 100), 1)

    def test_middle_sums_of_a_progression(self):
        A = family("ap:0:1", 16)
        P = popular_set(A, A)
        self.assertIn(15, P)
        self.assertNotIn(0, P)
        self.assertNotIn(30, P)

    def test_parameters(self):
        with self.assertRaises(ParameterError):
            popular_set(S(1), S(1, 2))
        with self.assertRaises(ParameterError):
            popular_set(S(1, 2), EMPTY)


class RefinedSetTests(SimpleTestCase):
    def test_everything_popular(self):
        A, C = S(0, 3, 7), S(1, 2)
        self.assertEqual(refined_set(A, C, combine(A, SetOp.SUM, C)), A)

    def test_nothing_popular(self):
        self.assertEqual(len(refined_set(S(0, 3, 7), S(1, 2), EMPTY)), 0)

    def test_size_bound_on_a_progression(self):
        A = family("ap:0:1", 16)
        refined = refined_set(A, A, popular_set(A, A))
        self.assertTrue(refined_size_holds(A, refined).holds)


class EquivClassTests(SimpleTestCase):
    def test_diagonal_example(self):
        A, C = S(0, 1), S(0)
        table = equiv_classes(A, C, S(0), combine(A, SetOp.SUM, C))
        self.assertEqual(table.total, 2)
        self.assertEqual(table.sizes(), {(0, 0): 1, (0, 1): 1})
        self.assertTrue(table.keys_are_shifts())

    def test_unconstrained_count(self):
        A, C = S(0, 1, 3, 4), S(0, 2)
        D = combine(A, SetOp.DIFF, A)
        table = equiv_classes(A, C, D, combine(A, SetOp.SUM, C))
        self.assertEqual(table.total, len(A) ** 2 * len(C))
        self.assertTrue(table.keys_are_shifts())
        self.assertLessEqual(len(table), solution_keys(D, combine(A, SetOp.SUM, C), combine(A, SetOp.SUM, C)))


class BalanceTests(SimpleTestCase):
    def test_bound_two_meets_bound_one(self):
        b1, b2 = parse_bound("13/6:-1/6"), parse_bound("-14/19:11/19")
        x, value = balance_exponents(b1, b2)
        self.assertEqual(x, Fraction(331, 85))
        self.assertEqual(value, Fraction(129, 85))
        self.assertEqual(value, Fraction(3, 2) + Fraction(3, 170))

    def test_swap_invariance(self):
        b1, b2 = ExponentBound(Fraction(13, 6), Fraction(-1, 6)), ExponentBound(Fraction(-14, 19), Fraction(11, 19))
        self.assertEqual(balance_exponents(b1, b2), balance_exponents(b2, b1))

    def test_rejected_bounds(self):
        with self.assertRaises(ParameterError):
            balance_exponents(ExponentBound(1, 2), ExponentBound(3, 2))
        with self.assertRaises(ParameterError):
            balance_exponents(ExponentBound(1, 2), ExponentBound(3, 1))
        with self.assertRaises(ParameterError):
            parse_bound("1/2")

    def test_specialisation(self):
        # (|A||A|)^49 <= |A + f(A)|^76
        self.assertEqual(specialise_exponent(76, 98), Fraction(49, 38))
        with self.assertRaises(ParameterError):
            specialise_exponent(0, 1)


class ExactClaimTests(SimpleTestCase):
    def test_sandwich_known_value(self):
        report = check(ClaimId.CS_SANDWICH, ClaimInputs(S(0, 1, 2, 3)))
        self.assertEqual(report.lhs, 44**2)
        self.assertEqual(report.rhs, 44**2)
        self.assertEqual(report.verdict, "pass")
        self.assertEqual(report.pass_mode, PassMode.EXACT)

    def test_sandwich_on_random_pairs(self):
        rng = random.Random(500)
        for index in range(500):
            op = (SetOp.DIFF, SetOp.RATIO)[index % 2]
            A = seeded_set(rng, rng.randint(1, 8), zero=op == SetOp.DIFF)
            B = seeded_set(rng, rng.randint(1, 8), zero=op == SetOp.DIFF)
            report = check(ClaimId.CS_SANDWICH, ClaimInputs(A, B, op=op))
            self.assertEqual(report.verdict, "pass", (list(A), list(B), op))

    def test_sandwich_rejects_sum(self):
        with self.assertRaises(ParameterError):
            check(ClaimId.CS_SANDWICH, ClaimInputs(S(1, 2), op=SetOp.SUM))

    @hypothesis_settings(max_examples=200, deadline=None)
    @given(small_sets, small_sets)
    def test_holder_mixed(self, A, C):
        report = check(ClaimId.HOLDER_MIXED, ClaimInputs(A, C=C))
        self.assertEqual(report.verdict, "pass")


class TrendClaimTests(SimpleTestCase):
    square = parse_function("square")

    def test_lem_count_on_progression(self):
        A = family("ap:1:1", 8)
        report = check(ClaimId.LEM_COUNT, ClaimInputs(A))
        self.assertEqual(report.lhs, 64)
        self.assertEqual(report.failed_conditions, [])
        self.assertEqual(report.verdict, "recorded")

    def test_lem_e3_on_geometric_progression(self):
        A = family("gp:1:2", 8)
        report = check(ClaimId.LEM_E3, ClaimInputs(A))
        self.assertEqual(report.lhs, energy(A, A, 3).value)
        self.assertEqual(report.failed_conditions, [])

    def test_lem_e3_side_condition(self):
        A = family("gp:1:2", 8)
        with self.assertRaisesMessage(SideConditionViolation, "r_{Q/R}(a) >= T"):
            check(ClaimId.LEM_E3, ClaimInputs(A, T=100))

    def test_lem_e3_convex(self):
        report = check(ClaimId.LEM_E3_CONVEX, ClaimInputs(family("ap:1:1", 12), f=self.square))
        self.assertEqual(report.failed_conditions, [])

    def test_function_required(self):
        with self.assertRaises(ParameterError):
            check(ClaimId.THM_MAIN_38, ClaimInputs(family("ap:1:1", 8)))

    def test_main_38_on_progression(self):
        n = 16
        report = check(ClaimId.THM_MAIN_38, ClaimInputs(family("ap:1:1", n), f=self.square))
        self.assertEqual(report.lhs, (n * n) ** 49)
        self.assertEqual(report.direction, "le")
        self.assertEqual(report.verdict, "recorded")

    def test_main_diff_sandwiches(self):
        report = check(ClaimId.THM_MAIN_DIFF, ClaimInputs(family("ap:1:1", 12), f=self.square, sign="-"))
        sandwiches = [c for c in report.conditions if "sandwich" in c.name]
        self.assertEqual(len(sandwiches), 4)
        self.assertTrue(all(c.holds for c in sandwiches))
        with self.assertRaises(ParameterError):
            check(ClaimId.THM_MAIN_DIFF, ClaimInputs(family("ap:1:1", 12), f=self.square, sign="*"))

    def test_A_times_A_plus_one(self):
        report = check(ClaimId.COR_A_APLUS1, ClaimInputs(S(1, 2, 3)))
        self.assertEqual(report.lhs, 7)
        self.assertEqual(report.direction, "ge")

    def test_convex_sum_with_image(self):
        report = check(ClaimId.COR_CONVEX_49_38, ClaimInputs(family("ap:1:1", 8), f=self.square))
        self.assertEqual(report.lhs, 55)
        self.assertAlmostEqual(report.rhs, 8 ** (49 / 38))
        self.assertTrue(report.holds)
        # |A+A| + |f(A)+f(A)| = 15 + 34
        both = report.conditions[0]
        self.assertFalse(both.binding)
        self.assertTrue(both.holds)
        self.assertEqual(report.verdict, "recorded")

    def test_convex_differences(self):
        A = family("ap:1:1", 8)
        fA = image(A, self.square)
        report = check(ClaimId.COR_CONVEX_DIFF, ClaimInputs(A, f=self.square))
        self.assertEqual(report.lhs, 15**5 * len(combine(fA, SetOp.DIFF, fA)) ** 5)
        self.assertEqual(report.rhs, 8**13)
        self.assertTrue(report.holds)
        with self.assertRaises(ParameterError):
            check(ClaimId.COR_CONVEX_DIFF, ClaimInputs(A))

    def test_asymmetric_sum_product(self):
        report = check(ClaimId.COR_SUMPROD_ASYM, ClaimInputs(S(1, 2, 4)))
        self.assertEqual(report.lhs, 30**38)
        self.assertEqual(report.rhs, 9**49)
        self.assertTrue(report.holds)
        report = check(ClaimId.COR_SUMPROD_ASYM, ClaimInputs(S(1, 2, 3), B=S(1, 10)))
        self.assertEqual(report.lhs, 36**38)
        self.assertEqual(report.rhs, 6**49)
        self.assertTrue(report.holds)

    def test_e3_product_after_decomposition(self):
        A = family("ap:1:1", 16)
        report = check(ClaimId.COR_E3_PRODUCT, ClaimInputs(A, f=self.square))
        cert = decomp(A, A, SetOp.DIFF, 3, Fraction(1, 2))
        fA = image(A, self.square)
        self.assertEqual(report.lhs, energy(cert.B, A, 3).value * energy(image(cert.C, self.square), fA, 3).value)
        self.assertEqual(report.rhs, 16**7)
        self.assertEqual(report.conditions[0].name, "decomposition certificate checks failing")
        self.assertTrue(report.conditions[0].holds)
        self.assertEqual(report.failed_conditions, [])
        self.assertEqual(report.verdict, "recorded")

    def test_e32_needs_convex_set(self):
        with self.assertRaises(SideConditionViolation):
            check(ClaimId.E32_CONVEX, ClaimInputs(family("ap:1:1", 8)))
        report = check(ClaimId.E32_CONVEX, ClaimInputs(family("ap:1:1", 8), f=self.square))
        self.assertIsNotNone(report.margin)

    def test_ratio_count_matches_oracle(self):
        A = S(1, 2, 4)
        self.assertEqual(check(ClaimId.RATIO_COUNT, ClaimInputs(A)).lhs, ratio_quadruple_oracle(A))

    def test_incidence_lower_bound(self):
        A = family("ap:1:1", 6)
        report = check(ClaimId.THM_INCIDENCE, ClaimInputs(A))
        self.assertEqual(report.failed_conditions, [])
        self.assertGreaterEqual(report.lhs, 6**3)

    def test_AB_plus_A(self):
        A = family("gp:1:2", 8)
        report = check(ClaimId.THM_ABPLUSA, ClaimInputs(A))
        values = {a * b + c for a in A for b in A for c in A}
        self.assertEqual(report.lhs, len(values))
        e4 = next(c for c in report.conditions if c.name == "E_4x(A) <= |A| E_3x(A)")
        self.assertTrue(e4.holds)

    def test_energy_general_instances(self):
        rng = random.Random(50)
        for _ in range(50):
            A = seeded_set(rng, rng.randint(8, 14))
            C = seeded_set(rng, rng.randint(2, 10))
            report = check(ClaimId.PROP_ENERGY_GENERAL, ClaimInputs(A, C=C))
            self.assertEqual(report.failed_conditions, [], (list(A), list(C)))
            self.assertEqual(report.verdict, "recorded")


class ReportTests(SimpleTestCase):
    def test_margin_direction(self):
        le = ClaimReport(ClaimId.RATIO_COUNT, "x", 4, lhs=2, rhs=8, direction="le")
        ge = ClaimReport(ClaimId.COR_CONVEX_DIFF, "x", 4, lhs=2, rhs=8, direction="ge")
        self.assertAlmostEqual(le.margin, -ge.margin)
        self.assertGreater(le.margin, 0)
        self.assertAlmostEqual(le.ratio, 0.25)

    def test_non_positive_sides(self):
        report = ClaimReport(ClaimId.RATIO_COUNT, "x", 4, lhs=0, rhs=8)
        self.assertIsNone(report.margin)
        self.assertIsNone(report.ratio)

    def test_binding_condition_fails_report(self):
        failing = Condition("x <= y", "2", "1", False)
        recorded = Condition("x << y", "2", "1", False, binding=False)
        self.assertEqual(ClaimReport(ClaimId.LEM_E3, "x", 4, lhs=1, rhs=2, conditions=(recorded,)).verdict, "recorded")
        self.assertEqual(ClaimReport(ClaimId.LEM_E3, "x", 4, lhs=1, rhs=2, conditions=(failing,)).verdict, "fail")
        self.assertEqual(ClaimReport.failed(ClaimId.LEM_E3, "x", 4, "boom").verdict, "fail")

    def test_describe(self):
        inputs = ClaimInputs(S(1, 2), f=parse_function("square"), c1=Fraction(1, 2), labels={"A": "ap:1:1:2"})
        self.assertEqual(inputs.describe(), {"A": "ap:1:1:2", "f": "square", "c1": "1/2"})


class ScanTests(SimpleTestCase):
    def test_sizes(self):
        self.assertEqual(check_sizes([4, 8, 16]), (4, 8, 16))
        for sizes in ([4, 8], [4, 4, 8], [8, 4, 16]):
            with self.assertRaises(ParameterError):
                check_sizes(sizes)

    def test_slope(self):
        self.assertAlmostEqual(fit_slope([2, 4, 8], [1.0, 2.0, 3.0]), 1 / 0.6931471805599453)
        self.assertIsNone(fit_slope([2, 4, 8], [None, None, 1.0]))

    def test_main_38_trend(self):
        square = parse_function("square")
        result = scan(ClaimId.THM_MAIN_38, parse_family("ap:1:1"), [8, 16, 32], lambda A, n: ClaimInputs(A, f=square))
        self.assertEqual([r.n for r in result.reports], [8, 16, 32])
        self.assertGreater(result.slope, 0)
        self.assertEqual(result.verdict, "pass")

    def test_convex_sum_trend(self):
        square = parse_function("square")
        sizes = [16, 32, 64, 128, 256]
        result = scan(ClaimId.COR_CONVEX_49_38, parse_family("ap:1:1"), sizes, lambda A, n: ClaimInputs(A, f=square))
        self.assertEqual([r.n for r in result.reports], sizes)
        self.assertGreaterEqual(result.slope, 0)
        self.assertEqual(result.failed_cells, [])
        self.assertEqual(result.verdict, "pass")

    def test_exact_scan(self):
        result = scan(ClaimId.CS_SANDWICH, parse_family("rand:50:3"), [4, 6, 8], threads=2)
        self.assertEqual(result.pass_mode, PassMode.EXACT)
        self.assertEqual(result.verdict, "pass")

    def test_failed_cell_does_not_abort(self):
        result = scan(ClaimId.THM_INCIDENCE, parse_family("ap:0:1"), [4, 5, 6])
        self.assertEqual(len(result.reports), 3)
        self.assertTrue(all(r.error for r in result.reports))
        self.assertEqual(result.verdict, "fail")
