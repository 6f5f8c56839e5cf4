import random

from django.test import SimpleTestCase, override_settings

from generators.families import generate, parse_family
from incidence.services import (
    Line,
    Point,
    count_by_scan,
    count_grid_incidences,
    count_incidences,
    count_solutions_qr,
    grid,
    line_energy_experiment,
    lines_from,
    ratio_quadruple_count,
    ratio_quadruple_oracle,
)
from numeric.exceptions import BackendMismatch, SizeGuardExceeded, ZeroElementError
from setcore.sets import from_values


def S(*values):
    return from_values(values)


class CountIncidencesTests(SimpleTestCase):
    def test_collinear_points(self):
        points = [Point(0, 0), Point(1, 1), Point(2, 2)]
        self.assertEqual(count_incidences(points, [Line(1, 0)]), 3)
        self.assertEqual(count_incidences(points, []), 0)

    def test_grid_with_two_diagonals(self):
        points = grid(range(3), range(3))
        lines = [Line(1, 0), Line(-1, 2)]
        self.assertEqual(count_incidences(points, lines, cross_check=True), 6)
        self.assertEqual(count_grid_incidences(S(0, 1, 2), S(0, 1, 2), lines), 6)

    def test_float_coordinates_rejected(self):
        with self.assertRaises(BackendMismatch):
            Point(0.5, 1)

    def test_both_counters_agree_on_random_instances(self):
        rng = random.Random(100)
        for _ in range(100):
            points = list({Point(rng.randint(-6, 6), rng.randint(-6, 6)) for _ in range(rng.randint(0, 40))})
            lines = list({Line(rng.randint(-3, 3), rng.randint(-5, 5)) for _ in range(rng.randint(0, 15))})
            self.assertEqual(count_incidences(points, lines), count_by_scan(points, lines))

    def test_grid_counter_matches_generic_counter(self):
        rng = random.Random(7)
        for _ in range(30):
            X = from_values(rng.sample(range(-8, 9), rng.randint(1, 6)))
            Y = from_values(rng.sample(range(-8, 9), rng.randint(1, 6)))
            lines = list({Line(rng.randint(-3, 3), rng.randint(-4, 4)) for _ in range(8)})
            self.assertEqual(count_grid_incidences(X, Y, lines), count_incidences(grid(X, Y), lines, cross_check=True))


class LinesFromTests(SimpleTestCase):
    def test_sizes(self):
        self.assertEqual(lines_from(S(1)), [Line(1, 1)])
        self.assertEqual(len(lines_from(S(1, 2))), 4)
        A = S(-3, 1, 2, 7, 11)
        self.assertEqual(len(set(lines_from(A))), len(A) ** 2)

    def test_zero_rejected(self):
        with self.assertRaises(ZeroElementError):
            lines_from(S(0, 1))


class SolutionCountTests(SimpleTestCase):
    def test_examples(self):
        one = S(1)
        self.assertEqual(count_solutions_qr(one, one, one, one), 0)
        self.assertEqual(count_solutions_qr(S(1, 2), S(1, 2), S(0), S(1, 2, 4)), 4)

    def test_random_instances_and_sanity_bounds(self):
        rng = random.Random(50)
        for _ in range(50):
            Q, R, B, C = (from_values(rng.sample(range(-6, 7), rng.randint(1, 5))) for _ in range(4))
            count = count_solutions_qr(Q, R, B, C)
            self.assertLessEqual(count, len(Q) * len(R) * len(B))
            self.assertLessEqual(count, len(Q) * len(B) * len(C) * len(R))


class LineEnergyTests(SimpleTestCase):
    def test_small_instance(self):
        report = line_energy_experiment(S(1, 2), S(1, 2))
        self.assertEqual(report.lower_bound, 8)
        self.assertGreaterEqual(report.incidences, 8)
        self.assertGreater(report.rhs, 0)

    def test_geometric_progression(self):
        A = generate(parse_family("gp:2:2"), 8)
        report = line_energy_experiment(A, A)
        self.assertGreaterEqual(report.incidences, len(A) ** 3)

    def test_seeded_instances(self):
        rng = random.Random(32)
        for _ in range(50):
            n = rng.randint(1, 12)
            A = from_values(rng.sample([x for x in range(-20, 21) if x], n))
            B = from_values(rng.sample(range(-20, 21), n))
            report = line_energy_experiment(A, B)
            self.assertGreaterEqual(report.incidences, report.lower_bound)

    def test_zero_in_A(self):
        with self.assertRaises(ZeroElementError):
            line_energy_experiment(S(0, 1), S(1))


class RatioQuadrupleTests(SimpleTestCase):
    def test_two_point_set(self):
        self.assertEqual(ratio_quadruple_count(S(0, 1)), 24)
        self.assertEqual(ratio_quadruple_oracle(S(0, 1)), 24)

    def test_singleton(self):
        self.assertEqual(ratio_quadruple_count(S(5)), 0)

    def test_histogram_matches_octuple_loop(self):
        rng = random.Random(20)
        for _ in range(20):
            A = from_values(rng.sample(range(-10, 11), rng.randint(1, 4)))
            self.assertEqual(ratio_quadruple_count(A), ratio_quadruple_oracle(A))

    def test_five_point_progression(self):
        A = S(0, 1, 2, 3, 4)
        self.assertEqual(ratio_quadruple_count(A), ratio_quadruple_oracle(A))

    @override_settings(ENERGYLAB_ORACLE_LIMIT=3)
    def test_size_guard(self):
        with self.assertRaises(SizeGuardExceeded):
            ratio_quadruple_count(S(1, 2, 3, 4))
