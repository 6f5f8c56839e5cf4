import tempfile
from fractions import Fraction
from pathlib import Path

from django.test import SimpleTestCase
from hypothesis import given, strategies as st

from convexfn.registry import parse_function
from numeric.exceptions import BackendMismatch, DomainError, ParameterError, ZeroElementError
from numeric.scalars import Backend, Tolerance
from setcore.files import parse_set_text, read_set_file, write_set_file
from setcore.ops import SetOp, combine, rep_function
from setcore.sets import EMPTY, affine, from_values, image, promote, reciprocal

small_sets = st.lists(st.integers(min_value=-40, max_value=40), min_size=1, max_size=10).map(from_values)
zero_free_sets = st.lists(
    st.integers(min_value=1, max_value=40) | st.integers(min_value=-40, max_value=-1), min_size=1, max_size=8
).map(from_values)


def S(*values):
    return from_values(values)


class FromValuesTests(SimpleTestCase):
    def test_sorts_and_deduplicates(self):
        self.assertEqual(tuple(from_values([3, 1, 2, 2])), (1, 2, 3))
        self.assertEqual(from_values([]), EMPTY)

    def test_tolerant_values_are_merged(self):
        merged = from_values([1.0, 1.0 + 1e-12], tol=Tolerance(1e-9))
        self.assertEqual(len(merged), 1)
        self.assertEqual(merged.backend, Backend.TOLERANT)
        self.assertEqual(merged[0], 1.0)

    def test_mixed_backends_rejected(self):
        with self.assertRaises(BackendMismatch):
            from_values([1, 2.5])

    def test_fractions_are_canonical(self):
        A = from_values([Fraction(4, 2), Fraction(1, 2)])
        self.assertEqual(tuple(A), (Fraction(1, 2), 2))
        self.assertIs(type(A[1]), int)


class CombineTests(SimpleTestCase):
    def test_sumsets(self):
        self.assertEqual(tuple(combine(S(1, 2), SetOp.SUM, S(10, 20))), (11, 12, 21, 22))
        self.assertEqual(tuple(combine(S(1, 2, 4), SetOp.SUM, S(1, 2, 4))), (2, 3, 4, 5, 6, 8))

    def test_ratio_set(self):
        expected = (Fraction(1, 4), Fraction(1, 2), 1, 2, 4)
        self.assertEqual(tuple(combine(S(1, 2, 4), SetOp.RATIO, S(1, 2, 4))), expected)

    def test_zero_element_rejected_for_multiplicative_ops(self):
        with self.assertRaises(ZeroElementError):
            combine(S(0, 1), SetOp.PROD, S(1, 2))
        with self.assertRaises(ZeroElementError):
            rep_function(S(1, 2), SetOp.RATIO, S(0, 3))

    def test_backend_mismatch(self):
        with self.assertRaises(BackendMismatch):
            combine(S(1), SetOp.SUM, from_values([1.5]))


class RepFunctionTests(SimpleTestCase):
    def test_difference_histogram(self):
        rep = rep_function(S(0, 1, 2), SetOp.DIFF, S(0, 1, 2))
        self.assertEqual(dict(rep), {-2: 1, -1: 2, 0: 3, 1: 2, 2: 1})
        self.assertEqual(rep[17], 0)
        self.assertEqual(rep.total, 9)
        self.assertEqual(rep.max_count, 3)

    def test_singleton_product(self):
        self.assertEqual(dict(rep_function(S(1), SetOp.PROD, S(1))), {1: 1})

    def test_ratio_histogram(self):
        rep = rep_function(S(1, 2, 4), SetOp.RATIO, S(1, 2, 4))
        self.assertEqual(dict(rep), {1: 3, 2: 2, Fraction(1, 2): 2, 4: 1, Fraction(1, 4): 1})
        self.assertEqual(rep.multiplicities, {3: 1, 2: 2, 1: 2})

    @given(small_sets, small_sets, st.sampled_from([SetOp.SUM, SetOp.DIFF]))
    def test_mass_identity(self, A, B, op):
        self.assertEqual(rep_function(A, op, B).total, len(A) * len(B))

    @given(zero_free_sets, zero_free_sets, st.sampled_from([SetOp.PROD, SetOp.RATIO]))
    def test_mass_identity_multiplicative(self, A, B, op):
        self.assertEqual(rep_function(A, op, B).total, len(A) * len(B))

    @given(small_sets, small_sets)
    def test_reflection_symmetry(self, A, B):
        forward = rep_function(A, SetOp.DIFF, B)
        backward = rep_function(B, SetOp.DIFF, A)
        for x, count in forward.items():
            self.assertEqual(backward[-x], count)

    @given(small_sets, small_sets, st.integers(min_value=-5, max_value=5).filter(bool), st.integers(-9, 9))
    def test_dilation_keeps_count_profile(self, A, B, lam, mu):
        original = rep_function(A, SetOp.DIFF, B)
        dilated = rep_function(affine(A, lam, mu), SetOp.DIFF, affine(B, lam, mu))
        self.assertEqual(sorted(original.values()), sorted(dilated.values()))

    @given(small_sets, small_sets)
    def test_sumset_size_bounds(self, A, B):
        size = len(combine(A, SetOp.SUM, B))
        self.assertLessEqual(size, len(A) * len(B))
        self.assertGreaterEqual(size, len(A) + len(B) - 1)


class TransformTests(SimpleTestCase):
    def test_affine(self):
        A = S(0, 1)
        self.assertEqual(affine(A, 1, 0), A)
        self.assertEqual(tuple(affine(A, 2, 1)), (1, 3))
        self.assertEqual(tuple(affine(S(1, 2), -1, 0)), (-2, -1))
        with self.assertRaises(ParameterError):
            affine(A, 0, 1)

    def test_image(self):
        self.assertEqual(tuple(image(S(1, 2, 3), parse_function("square"))), (1, 4, 9))
        self.assertEqual(tuple(image(S(1, 4), parse_function("pow:3/2"))), (1, 8))
        with self.assertRaises(DomainError):
            image(S(0, 1), parse_function("log"))

    def test_image_switches_backend(self):
        result = image(S(1, 2), parse_function("pow:3/2"))
        self.assertEqual(result.backend, Backend.TOLERANT)
        self.assertAlmostEqual(result[1], 2**1.5)

    def test_reciprocal_and_promote(self):
        self.assertEqual(tuple(reciprocal(S(1, 2, 4))), (Fraction(1, 4), Fraction(1, 2), 1))
        self.assertEqual(promote(S(1, 2), Backend.TOLERANT), from_values([1.0, 2.0]))
        with self.assertRaises(ZeroElementError):
            reciprocal(S(0, 1))


class SetFileTests(SimpleTestCase):
    def test_comments_and_blank_lines(self):
        A = parse_set_text("# squares\n4\n\n1  # first\n9/3\n")
        self.assertEqual(tuple(A), (1, 3, 4))

    def test_write_then_read(self):
        A = S(Fraction(-1, 3), 0, 7)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_set_file(A, Path(tmp) / "a.txt", comment="three values")
            self.assertTrue(path.read_text().startswith("# three values\n-1/3\n"))
            self.assertEqual(read_set_file(path), A)

    def test_missing_file(self):
        with self.assertRaises(ParameterError):
            read_set_file("/nonexistent/energylab/set.txt")

    def test_bad_line_is_located(self):
        with self.assertRaisesMessage(ParameterError, "<text>:2"):
            parse_set_text("1\nseven\n")

    def test_zero_denominator_is_located(self):
        with self.assertRaisesMessage(ParameterError, "<text>:3"):
            parse_set_text("1\n2\n1/0\n")
