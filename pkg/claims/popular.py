"""Popular sums and the equivalence classes of the general energy estimate."""

import logging
import math
from fractions import Fraction

import attrs

from numeric.bounds import PRECISION_SCHEDULE, L_interval, decide, max_precision
from numeric.exceptions import BackendMismatch, ParameterError
from setcore.ops import SetOp, rep_function
from setcore.sets import FiniteSet, from_values

logger = logging.getLogger(__name__)


def _require_exact(*sets: FiniteSet) -> None:
    if not all(S.is_exact for S in sets):
        raise BackendMismatch("popularity counts are exact only.")


def popularity_threshold(size_a: int, size_c: int, size_sum: int) -> int:
    """``max(1, ceil(|A||C| / (L(|A|) |A+C|)))``."""
    target = Fraction(size_a * size_c, size_sum)
    cap = max_precision()
    bound = None
    for m in [m for m in PRECISION_SCHEDULE if m <= cap] or [cap]:
        bound = target / L_interval(size_a, m)
        lo, hi = math.ceil(bound.lo), math.ceil(bound.hi)
        if lo == hi:
            return max(1, lo)
    logger.warning("Popularity threshold undecided between %s and %s; using the larger", bound.lo, bound.hi)
    return max(1, math.ceil(bound.hi))


def popular_set(A: FiniteSet, C: FiniteSet) -> FiniteSet:
    """Sums ``x`` in ``A + C`` with ``r_{A+C}(x)`` at least the popularity threshold."""
    if len(A) < 2:
        raise ParameterError(f"popular sums need |A| >= 2, got {len(A)}.")
    if not C:
        raise ParameterError("popular sums need a non-empty C.")
    _require_exact(A, C)
    rep = rep_function(A, SetOp.SUM, C)
    threshold = popularity_threshold(len(A), len(C), len(rep))
    logger.debug("Popular sums of |A|=%s, |C|=%s: threshold %s", len(A), len(C), threshold)
    return from_values(x for x, r in rep.items() if r >= threshold)


def refined_set(A: FiniteSet, C: FiniteSet, P: FiniteSet) -> FiniteSet:
    """``{a in A : a + c in P for at least |C|/2 of the c in C}``."""
    _require_exact(A, C, P)
    return A.keep(a for a in A if 2 * sum(1 for c in C if a + c in P) >= len(C))


def refined_size_holds(A: FiniteSet, refined: FiniteSet):
    """Decision for ``|A'| >= (1 - 2/L(|A|)) |A|``."""
    return decide(
        lambda m: L_interval(len(A), m) * len(refined),
        lambda m: (L_interval(len(A), m) - 2) * len(A),
        "ge",
    )


@attrs.frozen
class EquivClassTable:
    """Triples ``(a, b, c)`` grouped by ``(a - b, a + c)``.

    Shifting ``(a, b, c)`` to ``(a + s, b + s, c - s)`` keeps both keys, and
    two triples with equal keys differ by such a shift.
    """

    classes: dict = attrs.field(eq=False)

    @property
    def total(self) -> int:
        return sum(len(members) for members in self.classes.values())

    @property
    def second_moment(self) -> int:
        return sum(len(members) ** 2 for members in self.classes.values())

    def sizes(self) -> dict:
        return {key: len(members) for key, members in self.classes.items()}

    def keys_are_shifts(self) -> bool:
        """Every class is a single orbit of ``(a, b, c) -> (a + s, b + s, c - s)``."""
        for members in self.classes.values():
            a0, b0, c0 = members[0]
            if any(not (a - a0 == b - b0 == c0 - c) for a, b, c in members):
                return False
        return True

    def __len__(self) -> int:
        return len(self.classes)


def equiv_classes(A: FiniteSet, C: FiniteSet, D: FiniteSet, P: FiniteSet) -> EquivClassTable:
    _require_exact(A, C, D, P)
    classes: dict = {}
    for a in A:
        partners = [c for c in C if a + c in P]
        if not partners:
            continue
        for b in A:
            d = a - b
            if d in D:
                for c in partners:
                    classes.setdefault((d, a + c), []).append((a, b, c))
    return EquivClassTable({key: tuple(members) for key, members in classes.items()})


def solution_keys(D: FiniteSet, P: FiniteSet, S: FiniteSet) -> int:
    """``|{(d, s1, s2) in D x P x S : d = s1 - s2}|``."""
    return sum(1 for d in D for s in P if s - d in S)
