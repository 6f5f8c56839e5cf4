import tempfile
from fractions import Fraction
from pathlib import Path

from django.test import SimpleTestCase, override_settings
from hypothesis import given, strategies as st

from generators.families import FamilyTag, generate, parse_family, parse_set_descriptor, verify_convexity
from generators.rng import SplitMix64
from numeric.exceptions import ParameterError
from numeric.scalars import Backend
from setcore.files import write_set_file
from setcore.sets import from_values


class SplitMix64Tests(SimpleTestCase):
    def test_documented_vectors(self):
        vectors = {
            0: [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F],
            0x5EED: [0x09F1FD9D03F0A9B4, 0x553274161BBF8475, 0x5D5BCA4696B343B3],
            42: [0xBDD732262FEB6E95, 0x28EFE333B266F103, 0x47526757130F9F52],
        }
        for seed, expected in vectors.items():
            rng = SplitMix64(seed)
            self.assertEqual([rng.next_u64() for _ in expected], expected)

    @given(st.integers(min_value=0, max_value=2**64 - 1), st.integers(min_value=1, max_value=10**6))
    def test_below_stays_in_range(self, seed, bound):
        rng = SplitMix64(seed)
        self.assertTrue(all(0 <= rng.below(bound) < bound for _ in range(5)))


class GenerateTests(SimpleTestCase):
    def test_progressions(self):
        self.assertEqual(tuple(generate(parse_family("ap:0:1"), 4)), (0, 1, 2, 3))
        self.assertEqual(tuple(generate(parse_family("gp:1:2"), 4)), (1, 2, 4, 8))
        self.assertEqual(tuple(generate(parse_family("ap:1/2:1/2"), 3)), (Fraction(1, 2), 1, Fraction(3, 2)))

    def test_convex_image(self):
        self.assertEqual(tuple(generate(parse_family("convex:square"), 4)), (1, 4, 9, 16))
        self.assertEqual(generate(parse_family("convex:exp"), 5).backend, Backend.TOLERANT)

    def test_random_family_is_deterministic(self):
        spec = parse_family("rand:1000:7")
        first = generate(spec, 50)
        self.assertEqual(len(first), 50)
        self.assertEqual(first, generate(parse_family("rand:1000:7"), 50))
        self.assertNotEqual(first, generate(parse_family("rand:1000:8"), 50))
        self.assertTrue(all(1 <= x <= 1000 for x in first))

    @override_settings(ENERGYLAB_DEFAULT_SEED=7)
    def test_random_family_uses_default_seed(self):
        self.assertEqual(generate(parse_family("rand:1000"), 20), generate(parse_family("rand:1000:7"), 20))

    def test_random_range_too_small(self):
        with self.assertRaises(ParameterError):
            generate(parse_family("rand:5:1"), 6)

    def test_perturbed_progression(self):
        A = generate(parse_family("pap:0:10:3:11"), 30)
        self.assertEqual(len(A), 30)
        self.assertTrue(all(abs(a - 10 * i) <= 3 for i, a in enumerate(A)))

    def test_perturbed_progression_with_overlapping_windows(self):
        family = parse_family("pap:0:1:3:0x5")
        A = generate(family, 40)
        self.assertEqual(len(A), 40)
        self.assertGreaterEqual(min(A), -3)
        self.assertLessEqual(max(A), 39 + 3)
        self.assertEqual(generate(family, 40), A)

    def test_invalid_parameters(self):
        for text in ["gp:0:2", "gp:1:1", "gp:1:-1", "ap:0:0", "pap:0:0:1", "pap:0:1:-1", "zz:1", "convex:", "ap:1"]:
            with self.assertRaises(ParameterError, msg=text):
                parse_family(text)
        with self.assertRaises(ParameterError):
            generate(parse_family("ap:0:1"), 0)

    def test_family_strings_round_trip(self):
        for text in ["ap:0:1", "gp:1:2", "convex:pow:3/2", "rand:100:0x7", "pap:0:5:2:0x1"]:
            self.assertEqual(str(parse_family(text)), text)
        self.assertEqual(parse_family("convex:square").tag, FamilyTag.CONVEX)


class DescriptorTests(SimpleTestCase):
    def test_family_with_size(self):
        A, label = parse_set_descriptor("ap:0:1:64")
        self.assertEqual(len(A), 64)
        self.assertEqual(label, "ap:0:1:64")
        B, _ = parse_set_descriptor("convex:pow:3/2:4")
        self.assertEqual(B[0], 1)

    def test_set_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_set_file(from_values([5, 1, 3]), Path(tmp) / "a.txt")
            A, label = parse_set_descriptor(str(path))
        self.assertEqual(tuple(A), (1, 3, 5))
        self.assertEqual(label, str(path))


class ConvexityTests(SimpleTestCase):
    def test_examples(self):
        self.assertTrue(verify_convexity(from_values([1, 4, 9, 16])))
        self.assertFalse(verify_convexity(from_values([0, 1, 2, 3])))
        self.assertTrue(verify_convexity(from_values([1, 2, 4, 8])))
        with self.assertRaises(ParameterError):
            verify_convexity(from_values([1, 2]))

    @given(st.sampled_from(["square", "cube+", "pow:3/2", "pow:7/4", "exp", "neg:sqrt"]), st.integers(3, 40))
    def test_convex_family_is_convex(self, fn, n):
        self.assertTrue(verify_convexity(generate(parse_family(f"convex:{fn}"), n)))
