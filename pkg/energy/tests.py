import random
from fractions import Fraction

from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings as hypothesis_settings, strategies as st

from energy.services import (
    brute_force_energy,
    check_sandwich,
    dominant_class,
    dyadic_decompose,
    energy,
    energy_interval,
    mixed_sum,
    restricted_energy,
)
from numeric.exceptions import ParameterError, SizeGuardExceeded
from setcore.ops import SetOp, combine, rep_function
from setcore.sets import affine, from_values

small_sets = st.lists(st.integers(min_value=-30, max_value=30), min_size=1, max_size=9).map(from_values)
exponents = st.sampled_from([Fraction(1), Fraction(3, 2), Fraction(2), Fraction(12, 7), Fraction(5, 2), Fraction(3)])


def S(*values):
    return from_values(values)


def seeded_set(rng, size, low=-20, high=20):
    return from_values(rng.sample(range(low, high + 1), size))


class EnergyExamplesTests(SimpleTestCase):
    def test_first_moment_is_mass(self):
        self.assertEqual(energy(S(1, 2), S(5, 7), 1).value, 4)

    def test_known_values(self):
        A = S(0, 1, 2, 3)
        self.assertEqual(energy(A, A, 2).value, 44)
        self.assertEqual(energy(S(0, 1, 2), S(0, 1, 2), 3).value, 45)
        self.assertEqual(energy(S(1, 2, 4), S(1, 2, 4), 2, SetOp.RATIO).value, 19)

    def test_integer_exponent_is_exact(self):
        value = energy(S(0, 1, 2), S(0, 1, 2), 3)
        self.assertTrue(value.exact)
        self.assertEqual(value.support_size, 5)

    def test_fractional_exponent(self):
        value = energy(S(0, 1, 2), S(0, 1, 2), Fraction(3, 2))
        self.assertFalse(value.exact)
        self.assertAlmostEqual(value.value, 2 + 2 * 2**1.5 + 3**1.5)

    def test_exponent_below_one(self):
        with self.assertRaises(ParameterError):
            energy(S(1), S(1), Fraction(1, 2))


class RestrictedAndMixedTests(SimpleTestCase):
    def test_restricted_energy(self):
        rep = rep_function(S(0, 1, 2), SetOp.DIFF, S(0, 1, 2))
        self.assertEqual(restricted_energy(rep, [0], 3).value, 27)
        self.assertEqual(restricted_energy(rep, [], 3).value, 0)
        self.assertEqual(restricted_energy(rep, rep.support(), 3).value, 45)
        self.assertEqual(restricted_energy(rep, [100], 3).value, 0)

    def test_mixed_sum(self):
        rep = rep_function(S(0, 1), SetOp.DIFF, S(0, 1))
        self.assertEqual(mixed_sum(rep, rep), 10)
        other = rep_function(S(10), SetOp.DIFF, S(0))
        self.assertEqual(mixed_sum(rep, other), 0)

    @given(small_sets)
    def test_mixed_sum_collapses_to_third_energy(self, A):
        rep = rep_function(A, SetOp.DIFF, A)
        self.assertEqual(mixed_sum(rep, rep), energy(A, A, 3).value)


class DyadicTests(SimpleTestCase):
    def test_four_point_progression(self):
        A = S(0, 1, 2, 3)
        rep = rep_function(A, SetOp.DIFF, A)
        classes = dyadic_decompose(rep, 2)
        self.assertEqual([c.t for c in classes], [1, 2, 4])
        self.assertEqual([tuple(c.members) for c in classes], [(-3, 3), (-2, -1, 1, 2), (0,)])
        self.assertEqual([c.contribution for c in classes], [2, 26, 16])
        self.assertEqual(dominant_class(rep, 2).t, 2)

    def test_single_class(self):
        rep = rep_function(S(1, 2), SetOp.SUM, S(10, 20))
        classes = dyadic_decompose(rep, 3)
        self.assertEqual(len(classes), 1)
        self.assertEqual(dominant_class(rep, 3), classes[0])

    def test_empty_support(self):
        with self.assertRaises(ParameterError):
            dyadic_decompose(rep_function(S(), SetOp.DIFF, S(1)), 2)

    @hypothesis_settings(deadline=None)
    @given(small_sets, small_sets, exponents)
    def test_classes_partition_the_support(self, A, B, k):
        rep = rep_function(A, SetOp.DIFF, B)
        classes = dyadic_decompose(rep, k)
        members = sorted(x for c in classes for x in c.members)
        self.assertEqual(members, list(rep.support()))
        self.assertLessEqual(len(classes), rep.max_count.bit_length())
        for c in classes:
            self.assertTrue(all(c.t <= rep[x] < 2 * c.t for x in c.members))
        if k.denominator == 1:
            self.assertEqual(sum(c.contribution for c in classes), energy(A, B, k).value)

    def test_sandwich_on_seeded_instances(self):
        rng = random.Random(500)
        for _ in range(500):
            A = seeded_set(rng, rng.randint(1, 12))
            V = seeded_set(rng, rng.randint(1, 12))
            k = rng.choice([Fraction(2), Fraction(5, 2), Fraction(3), Fraction(12, 7)])
            rep = rep_function(A, SetOp.DIFF, V)
            sandwich = check_sandwich(rep, k, dominant_class(rep, k))
            self.assertTrue(sandwich.holds, msg=(A, V, k))

    def test_energy_interval_contains_float_value(self):
        A = S(0, 1, 2, 5, 9)
        rep = rep_function(A, SetOp.DIFF, A)
        enclosure = energy_interval(rep, Fraction(5, 2), 1024)
        value = energy(A, A, Fraction(5, 2)).value
        self.assertLessEqual(float(enclosure.lo), value * (1 + 1e-9))
        self.assertGreaterEqual(float(enclosure.hi), value * (1 - 1e-9))


class EnergyPropertyTests(SimpleTestCase):
    @given(small_sets, small_sets, exponents, exponents)
    def test_monotone_in_k(self, A, B, k1, k2):
        low, high = sorted((k1, k2))
        self.assertLessEqual(energy(A, B, low).value, energy(A, B, high).value * (1 + 1e-12))

    @given(small_sets, small_sets, small_sets)
    def test_monotone_in_sets(self, X, extra, Z):
        bigger = from_values(list(X) + list(extra))
        self.assertLessEqual(energy(X, Z, 3).value, energy(bigger, Z, 3).value)

    @given(small_sets)
    def test_reflection(self, X):
        D = combine(X, SetOp.DIFF, X)
        self.assertEqual(energy(affine(X, -1), D, 3).value, energy(X, D, 3).value)

    @given(small_sets, small_sets, st.integers(min_value=-6, max_value=6).filter(bool))
    def test_dilation(self, A, B, lam):
        self.assertEqual(energy(affine(A, lam), affine(B, lam), 2).value, energy(A, B, 2).value)

    @given(small_sets, small_sets)
    def test_cauchy_schwarz_sandwich(self, X, Y):
        e2 = energy(X, Y, 2).value
        self.assertLessEqual(len(X) ** 2 * len(Y) ** 2, e2 * len(combine(X, SetOp.SUM, Y)))
        self.assertLessEqual(e2 * e2, energy(X, X, 2).value * energy(Y, Y, 2).value)

    @given(small_sets, small_sets)
    def test_holder_mixed_sum(self, A, C):
        mixed = mixed_sum(rep_function(A, SetOp.DIFF, A), rep_function(C, SetOp.DIFF, C))
        self.assertLessEqual(mixed**3, energy(A, A, 3).value ** 2 * energy(C, C, 3).value)


class OracleTests(SimpleTestCase):
    @hypothesis_settings(max_examples=40, deadline=None)
    @given(
        st.lists(st.integers(min_value=-15, max_value=15), min_size=1, max_size=7).map(from_values),
        st.lists(st.integers(min_value=-15, max_value=15), min_size=1, max_size=7).map(from_values),
    )
    def test_additive_energies_match_tuple_counts(self, A, B):
        self.assertEqual(energy(A, B, 2).value, brute_force_energy(A, B, 2))
        self.assertEqual(energy(A, B, 3).value, brute_force_energy(A, B, 3))

    def test_seeded_oracle_sweep(self):
        rng = random.Random(100)
        for _ in range(100):
            A = seeded_set(rng, rng.randint(1, 10), 1, 30)
            self.assertEqual(energy(A, A, 2).value, brute_force_energy(A, A, 2))
            self.assertEqual(energy(A, A, 2, SetOp.RATIO).value, brute_force_energy(A, A, 2, SetOp.RATIO))
            if len(A) <= 6:
                self.assertEqual(energy(A, A, 3).value, brute_force_energy(A, A, 3))
                self.assertEqual(energy(A, A, 3, SetOp.RATIO).value, brute_force_energy(A, A, 3, SetOp.RATIO))

    @override_settings(ENERGYLAB_ORACLE_LIMIT=3)
    def test_size_guard(self):
        with self.assertRaises(SizeGuardExceeded):
            brute_force_energy(S(1, 2, 3, 4), S(1), 2)
