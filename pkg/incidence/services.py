import itertools
import logging
import math
from collections import Counter
from fractions import Fraction
from typing import Iterable

import attrs

from energy.services import energy, oracle_limit
from numeric.exceptions import BackendMismatch, InvariantViolation, SizeGuardExceeded, ZeroElementError
from numeric.scalars import Backend, Scalar, backend_of, canonical
from setcore.ops import SetOp
from setcore.sets import FiniteSet, from_values

logger = logging.getLogger(__name__)


def _exact(value: Scalar, what: str) -> Scalar:
    if backend_of(value) != Backend.EXACT:
        raise BackendMismatch(f"incidence counting is exact only; {what} {value!r} is a float.")
    return canonical(value)


@attrs.frozen
class Point:
    x: Scalar = attrs.field(converter=lambda v: _exact(v, "coordinate"))
    y: Scalar = attrs.field(converter=lambda v: _exact(v, "coordinate"))


@attrs.frozen
class Line:
    """The line ``y = slope * x + intercept``."""

    slope: Scalar = attrs.field(converter=lambda v: _exact(v, "slope"))
    intercept: Scalar = attrs.field(converter=lambda v: _exact(v, "intercept"))

    def contains(self, p: Point) -> bool:
        return p.y == self.slope * p.x + self.intercept


def grid(X: Iterable[Scalar], Y: Iterable[Scalar]) -> list[Point]:
    return [Point(x, y) for x in X for y in Y]


def count_by_scan(points: Iterable[Point], lines: Iterable[Line]) -> int:
    points = list(points)
    return sum(1 for line in lines for p in points if line.contains(p))


def count_by_hash(points: Iterable[Point], lines: Iterable[Line]) -> int:
    """Group lines by slope; under each slope a point lies on the line whose
    intercept equals ``y - slope * x``."""
    points = list(points)
    by_slope: dict = {}
    for line in lines:
        by_slope.setdefault(line.slope, []).append(line.intercept)
    total = 0
    for slope, intercepts in by_slope.items():
        keys = Counter(p.y - slope * p.x for p in points)
        total += sum(keys[b] for b in intercepts)
    return total


def count_incidences(points: Iterable[Point], lines: Iterable[Line], cross_check: bool = False) -> int:
    """Exact ``|{(p, l) : p on l}|`` for deduplicated points and lines."""
    points, lines = list(set(points)), list(set(lines))
    count = count_by_hash(points, lines)
    if cross_check:
        scanned = count_by_scan(points, lines)
        if scanned != count:
            raise InvariantViolation(f"incidence counters disagree: hash join {count}, scan {scanned}.")
    return count


def count_grid_incidences(X: FiniteSet, Y: FiniteSet, lines: Iterable[Line]) -> int:
    """Incidences between the grid ``X x Y`` and non-vertical lines: each line
    meets each column once."""
    ys = set(Y)
    return sum(1 for line in lines for x in X if line.slope * x + line.intercept in ys)


def lines_from(A: FiniteSet) -> list[Line]:
    """The ``|A|**2`` lines ``y = a x + a'`` with ``a, a'`` in ``A``."""
    if not A.is_exact:
        raise BackendMismatch("lines_from needs an exact set.")
    if 0 in A:
        raise ZeroElementError("lines y = a x + a' need 0 not in A.")
    return [Line(a, b) for a in A for b in A]


def count_solutions_qr(Q: FiniteSet, R: FiniteSet, B: FiniteSet, C: FiniteSet) -> int:
    """``|{(q, r, b, c) : c = q r - b}|``, cross-checked against the incidences of
    the lines ``y = q x - c`` with the grid ``R x B``."""
    for name, S in (("Q", Q), ("R", R), ("B", B), ("C", C)):
        if not S.is_exact:
            raise BackendMismatch(f"{name} must be exact for solution counting.")
    values = Counter(canonical(q * r - b) for q in Q for r in R for b in B)
    count = sum(values[c] for c in C)
    lines = [Line(q, -c) for q in Q for c in C]
    incidences = count_grid_incidences(R, B, lines)
    if incidences != count:
        raise InvariantViolation(f"c = qr - b count {count} differs from its incidence count {incidences}.")
    return count


@attrs.frozen
class LineEnergyReport:
    size_a: int
    size_b: int
    size_c: int
    incidences: int
    lower_bound: int
    e4_ratio: int
    rhs: float

    @property
    def ratio(self) -> float:
        return self.incidences / self.rhs


def line_energy_experiment(A: FiniteSet, B: FiniteSet) -> LineEnergyReport:
    """Incidences of ``B x (AB + A)`` with the lines ``y = a x + a'``."""
    lines = lines_from(A)
    if not B.is_exact:
        raise BackendMismatch("B must be exact for the line-energy experiment.")
    C = from_values(a * b + a2 for a in A for b in B for a2 in A)
    incidences = count_grid_incidences(B, C, lines)
    lower = len(A) ** 2 * len(B)
    if incidences < lower:
        raise InvariantViolation(f"only {incidences} incidences, but every line holds |B| points ({lower}).")
    e4 = energy(A, A, 4, SetOp.RATIO).value
    rhs = (
        e4 ** (1 / 12) * len(A) ** (7 / 6) * len(B) ** (2 / 3) * math.sqrt(len(C))
        + len(A) ** 2 * math.sqrt(len(C))
    )
    logger.info("Line energy |A|=%s |B|=%s: I=%s, lower bound %s", len(A), len(B), incidences, lower)
    return LineEnergyReport(len(A), len(B), len(C), incidences, lower, e4, rhs)


def ratio_counts(A: FiniteSet) -> Counter:
    """``N(v) = |{(a1..a4) : (a1 - a2)/(a3 - a4) = v, a3 != a4}|``."""
    diffs = Counter(a - b for a in A for b in A)
    numerators = list(diffs.items())
    counts: Counter = Counter()
    for den, m in diffs.items():
        if den == 0:
            continue
        for num, n in numerators:
            counts[canonical(Fraction(num) / den)] += n * m
    return counts


def _guard(A: FiniteSet, limit):
    limit = oracle_limit() if limit is None else limit
    if len(A) > limit:
        raise SizeGuardExceeded(f"ratio quadruple counting is limited to |A| <= {limit}, got {len(A)}.")
    if not A.is_exact:
        raise BackendMismatch("ratio quadruple counting needs an exact set.")


def ratio_quadruple_count(A: FiniteSet, limit: int = None) -> int:
    """Solutions of ``(a1 - a2)/(a3 - a4) = (a5 - a6)/(a7 - a8)`` with non-zero denominators."""
    _guard(A, limit)
    return sum(n * n for n in ratio_counts(A).values())


def ratio_quadruple_oracle(A: FiniteSet, limit: int = None) -> int:
    """The same count by looping over all octuples."""
    _guard(A, limit)
    total = 0
    for a1, a2, a3, a4, a5, a6, a7, a8 in itertools.product(A, repeat=8):
        d1, d2 = a3 - a4, a7 - a8
        if d1 and d2 and (a1 - a2) * d2 == (a5 - a6) * d1:
            total += 1
    return total

