import tempfile
from fractions import Fraction
from pathlib import Path

import attrs
from django.test import SimpleTestCase

from claims.popular import popular_set, refined_set
from energy.services import energy
from generators.families import generate, parse_family
from numeric.exceptions import BackendMismatch, InvariantViolation, ParameterError, ZeroElementError
from regularize.certificate import (
    dump_certificate,
    format_certificate,
    load_certificate,
    parse_certificate,
    verify_certificate,
)
from regularize.decomp import (
    _check_discard,
    _check_shrink,
    _step,
    choose_epsilon,
    decomp,
    epsilon_denominator,
    kept_by_epsilon,
    meets_fraction,
    slope_counts,
)
from regularize.rules import DROP_LARGEST, IDENTITY, RefinementRule, popular_sum, regu_refine
from setcore.ops import SetOp
from setcore.sets import from_values


def family(text, n):
    return generate(parse_family(text), n)


class EpsilonTests(SimpleTestCase):
    def test_steps_bound_is_an_integer(self):
        for size, k, c1 in [(64, Fraction(2), Fraction(1, 2)), (16, Fraction(5, 2), Fraction(1, 4)), (100, Fraction(3), Fraction(1, 2))]:
            eps = choose_epsilon(size, k, c1)
            self.assertEqual((c1 / eps).denominator, 1)
            self.assertLessEqual(eps, c1 / epsilon_denominator(size, k, c1, 1024).hi)

    def test_known_value(self):
        # 4 * 6 * (6 ln2 + ln2) = 168 ln2 = 116.45...
        self.assertEqual(choose_epsilon(64, Fraction(2), Fraction(1, 2)), Fraction(1, 234))


class DecompTests(SimpleTestCase):
    def test_arithmetic_progression(self):
        A = family("ap:0:1", 64)
        cert = decomp(A, A, SetOp.DIFF, 2, Fraction(1, 2))
        self.assertEqual(cert.iterations, 0)
        self.assertEqual(cert.B, A)
        self.assertEqual(cert.C, A)
        self.assertEqual(cert.t, 32)
        self.assertEqual(len(cert.D_t), 64)
        self.assertEqual(cert.trace[0].points, 3040)
        report = verify_certificate(cert)
        self.assertTrue(report.passed, report.failures)

    def test_geometric_progression_ratio(self):
        A = family("gp:1:2", 64)
        cert = decomp(A, A, SetOp.RATIO, 3, Fraction(1, 4))
        self.assertTrue(cert.C.issubset(cert.B))
        self.assertTrue(verify_certificate(cert).passed)

    def test_rejected_parameters(self):
        A = family("ap:1:1", 8)
        cases = [
            (A, A, SetOp.DIFF, 1, Fraction(1, 2), ParameterError),
            (A, A, SetOp.DIFF, 2, Fraction(1), ParameterError),
            (A, A, SetOp.SUM, 2, Fraction(1, 2), ParameterError),
            (family("ap:1:1", 3), A, SetOp.DIFF, 2, Fraction(1, 2), ParameterError),
            (family("ap:0:1", 8), A, SetOp.RATIO, 2, Fraction(1, 2), ZeroElementError),
            (family("convex:exp", 8), family("convex:exp", 8), SetOp.DIFF, 2, Fraction(1, 2), BackendMismatch),
        ]
        for A_, V, op, k, c1, error in cases:
            with self.assertRaises(error, msg=(op, k, c1)):
                decomp(A_, V, op, k, c1)

    def test_seeded_instances_verify(self):
        families = ["ap:1:1", "gp:1:2", "rand:400:11", "convex:square"]
        exponents = [Fraction(2), Fraction(5, 2), Fraction(3)]
        c1s = [Fraction(1, 4), Fraction(1, 2)]
        for index in range(200):
            name = families[index % 4]
            k = exponents[(index // 4) % 3]
            c1 = c1s[(index // 12) % 2]
            op = (SetOp.DIFF, SetOp.RATIO)[(index // 24) % 2]
            n = 16 + index * 240 // 199
            A = family(name, n)
            V = family(name, n // 2)
            with self.subTest(family=name, n=n, k=k, c1=c1, op=op):
                cert = decomp(A, V, op, k, c1)
                self.assertLessEqual(cert.iterations, cert.step_limit)
                report = verify_certificate(cert)
                self.assertTrue(report.passed, report.failures)

    def test_exponent_close_to_one(self):
        A = family("ap:0:1", 64)
        cert = decomp(A, A, SetOp.DIFF, Fraction(1001, 1000), Fraction(1, 2))
        report = verify_certificate(cert)
        self.assertTrue(report.passed, report.failures)
        closed_form = [check for check in report.checks if check.name.startswith("|C| >= c1 (1 - c1) |A|")]
        self.assertEqual(len(closed_form), 1)
        self.assertFalse(closed_form[0].binding)
        self.assertIs(closed_form[0].holds, False)
        self.assertEqual(report.notes, closed_form)


class DiscardStepTests(SimpleTestCase):
    """A block {0..3} whose differences with V = {0..7} fill the dominant class, and five far points.

    With eps = 1/2 the block is discarded at step 0 and the far points stop the iteration at step 1.
    """

    A = from_values([0, 1, 2, 3, 100, 200, 300, 400, 500])
    V = from_values(range(8))
    far = from_values([100, 200, 300, 400, 500])

    def test_first_step_discards_the_block(self):
        step = _step(self.A, self.V, SetOp.DIFF, Fraction(2), Fraction(1, 2))
        self.assertEqual(step.chosen.t, 4)
        self.assertEqual(tuple(step.chosen.members), (-4, -3, -2, -1, 0))
        self.assertEqual(step.points, 20)
        self.assertEqual(step.kept, self.far)
        self.assertEqual(step.mass, 0)
        self.assertFalse(step.stop)
        _check_shrink(step, Fraction(1, 2), 0)

        following = _step(step.kept, self.V, SetOp.DIFF, Fraction(2), Fraction(1, 2))
        self.assertEqual(following.chosen.t, 1)
        self.assertEqual(following.points, 40)
        self.assertTrue(following.stop)
        _check_discard(step, following, Fraction(2), 0)

    def test_helpers(self):
        counts = slope_counts(self.A, self.V, SetOp.DIFF, range(-4, 1))
        self.assertEqual([counts[a] for a in self.A], [5, 5, 5, 5, 0, 0, 0, 0, 0])
        self.assertEqual(kept_by_epsilon(counts, 20, Fraction(1, 2), 9), [100, 200, 300, 400, 500])
        self.assertEqual(kept_by_epsilon(counts, 20, Fraction(1, 3), 9), list(self.A))
        self.assertFalse(meets_fraction(0, 20, Fraction(2)))
        self.assertTrue(meets_fraction(5, 20, Fraction(2)))
        self.assertFalse(meets_fraction(4, 20, Fraction(2)))

    def test_violations_are_reported(self):
        step = _step(self.A, self.V, SetOp.DIFF, Fraction(2), Fraction(1, 2))
        with self.assertRaisesMessage(InvariantViolation, "step 0 kept 1 of 9"):
            _check_shrink(attrs.evolve(step, kept=from_values([100])), Fraction(1, 2), 0)
        with self.assertRaisesMessage(InvariantViolation, "step 3 discarded too little energy"):
            _check_discard(step, step, Fraction(2), 3)

    def test_certificate_with_coarse_epsilon(self):
        cert = decomp(self.A, self.V, SetOp.DIFF, 2, Fraction(3, 4), epsilon=Fraction(1, 2))
        self.assertEqual(cert.iterations, 1)
        self.assertEqual([step.stop for step in cert.trace], [False, True])
        self.assertEqual(cert.B, self.far)
        self.assertEqual(cert.C, self.far)
        self.assertEqual(cert.t, 1)
        report = verify_certificate(cert)
        self.assertEqual([check.name for check in report.failures], ["eps <= c1 / epsilon formula"])

    def test_coarse_epsilons_verify_apart_from_the_formula(self):
        for eps in (Fraction(1, 2), Fraction(1, 3), Fraction(1, 4)):
            with self.subTest(eps=eps):
                cert = decomp(self.A, self.V, SetOp.DIFF, 2, Fraction(3, 4), epsilon=eps)
                self.assertLessEqual(cert.iterations, cert.step_limit)
                report = verify_certificate(cert)
                self.assertEqual([check.name for check in report.failures], ["eps <= c1 / epsilon formula"])

    def test_epsilon_must_be_a_fraction_of_one(self):
        with self.assertRaises(ParameterError):
            decomp(self.A, self.V, SetOp.DIFF, 2, Fraction(3, 4), epsilon=Fraction(3, 2))


class CertificateTests(SimpleTestCase):
    def setUp(self):
        A = family("ap:0:1", 64)
        self.cert = decomp(A, A, SetOp.DIFF, 2, Fraction(1, 2))

    def test_text_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = dump_certificate(self.cert, Path(tmp) / "cert.txt")
            loaded = load_certificate(path)
        self.assertEqual(loaded, self.cert)
        self.assertIn("epsilon: 1/234", format_certificate(self.cert))

    def test_tampered_C_fails_lower_bound(self):
        tampered = attrs.evolve(self.cert, C=from_values([*self.cert.C, 200]))
        failed = {check.name for check in verify_certificate(tampered).failures}
        self.assertIn("r(c) >= |D_t| t / (2^(k+1) |B|) on C", failed)
        self.assertIn("C subset of B", failed)

    def test_tampered_t_fails_class_check(self):
        tampered = attrs.evolve(self.cert, t=16)
        failed = {check.name for check in verify_certificate(tampered).failures}
        self.assertIn("D_t is the class [t, 2t) of B o V", failed)
        self.assertIn("replay reproduces the certificate", failed)

    def test_parse_errors(self):
        text = format_certificate(self.cert)
        with self.assertRaises(ParameterError):
            parse_certificate(text.replace("op: diff\n", ""))
        with self.assertRaises(ParameterError):
            parse_certificate(text + "step: 1 2 3\n")
        with self.assertRaises(ParameterError):
            parse_certificate(text + "colour: blue\n")
        with self.assertRaises(ParameterError):
            load_certificate("/nonexistent/cert.txt")


class ReguRefineTests(SimpleTestCase):
    def test_identity_is_a_fixed_point(self):
        A = family("ap:0:1", 32)
        result = regu_refine(A, IDENTITY, 2, Fraction(1, 2))
        self.assertEqual(result.subset, A)
        self.assertEqual(result.steps, 0)

    def test_drop_largest(self):
        A = family("rand:200:3", 40)
        c1 = Fraction(1, 2)
        result = regu_refine(A, DROP_LARGEST, 3, c1)
        self.assertGreaterEqual(len(result.subset), (1 - c1) * len(A))
        self.assertTrue(result.subset.issubset(A))
        self.assertLess(result.steps, result.max_steps)

    def test_popular_sum_rule(self):
        A = family("ap:0:1", 32)
        c1 = Fraction(1, 2)
        result = regu_refine(A, popular_sum(A), 2, c1)
        B = result.subset
        R = refined_set(B, A, popular_set(B, A))
        self.assertGreaterEqual(len(B), (1 - c1) * len(A))
        self.assertGreaterEqual(
            energy(R, R, 2, SetOp.DIFF).value, result.c2 * energy(B, B, 2, SetOp.DIFF).value
        )

    def test_greedy_rule_is_reported(self):
        halve = RefinementRule("halve", lambda X, eps: X.keep(X[: len(X) // 2]))
        with self.assertRaisesMessage(InvariantViolation, "step 0"):
            regu_refine(family("ap:0:1", 32), halve, 2, Fraction(1, 2))

    def test_rule_must_return_a_subset(self):
        outside = RefinementRule("outside", lambda X, eps: from_values([x + 1000 for x in X]))
        with self.assertRaises(InvariantViolation):
            regu_refine(family("ap:0:1", 16), outside, 2, Fraction(1, 2))

    def test_parameters(self):
        A = family("ap:0:1", 16)
        with self.assertRaises(ParameterError):
            regu_refine(A, IDENTITY, 1, Fraction(1, 2))
        with self.assertRaises(ParameterError):
            regu_refine(A, IDENTITY, 2, Fraction(3, 2))
