"""Decomposition of ``A`` against ``V`` into a regular piece ``C <= B <= A``.

Each step takes the dominant dyadic class ``(t_i, D_i)`` of ``r_{A_i o V}``,
the point set ``P = {(a, v) : a o v in D_i}`` and the per-element slope count
``rho(a) = #{v : a o v in D_i}``. Elements with
``rho(a) > |P| / (eps |A_i|)`` are discarded; ``G`` is the mass of ``P`` that
survives. The iteration stops once ``|G| >= 2**-k |P|`` and then
``B = A_N``, ``C' = R_eps(B)`` and ``C`` keeps the elements of ``C'`` with
``rho(c) >= |P_B| / (2**(k + 1) |B|)``.

``o`` is ``-`` for the additive variant and ``/`` for the multiplicative one.
"""

import logging
import math
from fractions import Fraction

import attrs

from energy.services import DyadicClass, as_exponent, dominant_class, dyadic_decompose, energy_interval
from numeric.bounds import Interval, L_interval, decide, ln2_interval, ln_interval, power_interval
from numeric.exceptions import BackendMismatch, InvariantViolation, ParameterError
from numeric.scalars import parse_rational
from setcore.ops import RepFunction, SetOp, apply, check_operands, rep_function
from setcore.sets import FiniteSet

logger = logging.getLogger(__name__)

EPSILON_PRECISION = 256

DECOMPOSITION_OPS = (SetOp.DIFF, SetOp.RATIO)


@attrs.frozen
class TraceStep:
    size: int
    t: int
    class_size: int
    points: int
    kept: int
    stop: bool


@attrs.frozen
class DecompositionCertificate:
    A: FiniteSet
    V: FiniteSet
    op: SetOp = attrs.field(converter=SetOp)
    k: Fraction = attrs.field(converter=Fraction)
    c1: Fraction = attrs.field(converter=Fraction)
    epsilon: Fraction = attrs.field(converter=Fraction)
    B: FiniteSet
    C: FiniteSet
    t: int
    D_t: FiniteSet
    trace: tuple = attrs.field(converter=tuple)

    @property
    def iterations(self) -> int:
        return len(self.trace) - 1

    @property
    def step_limit(self) -> int:
        return math.ceil(self.c1 / self.epsilon)


def epsilon_denominator(size_a: int, k: Fraction, c1: Fraction, m: int) -> Interval:
    """Enclosure of ``2**k ln2 (k-1) L**2 - 2**k L ln(1 - c1)`` with ``L = L(|A|)``."""
    L = L_interval(size_a, m)
    inner = (k - 1) * ln2_interval(m) * L - ln_interval(1 - c1, m)
    return power_interval(2, k, m) * L * inner


def choose_epsilon(size_a: int, k: Fraction, c1: Fraction) -> Fraction:
    """The largest ``c1 / I`` with integer ``I`` not exceeding the formula value."""
    steps = math.ceil(epsilon_denominator(size_a, k, c1, EPSILON_PRECISION).hi)
    return c1 / steps


def slope_counts(X: FiniteSet, V: FiniteSet, op: SetOp, D) -> dict:
    """``rho(a) = #{v in V : a op v in D}`` for every ``a`` in ``X``."""
    members = set(D)
    return {a: sum(1 for v in V if apply(op, a, v) in members) for a in X}


def kept_by_epsilon(counts: dict, points: int, eps: Fraction, size: int) -> list:
    """Elements with ``rho(a) <= |P| / (eps |X|)``."""
    return [a for a, rho in counts.items() if rho * eps * size <= points]


def meets_fraction(count: int, points: int, exponent: Fraction) -> bool:
    """``count * 2**exponent >= points``, decided exactly; undecided counts as no."""
    return decide(lambda m: power_interval(2, exponent, m) * count, points, "ge").holds is True


@attrs.frozen
class _Step:
    X: FiniteSet
    rep: RepFunction
    classes: list = attrs.field(eq=False)
    chosen: DyadicClass
    counts: dict = attrs.field(eq=False)
    points: int
    kept: FiniteSet
    mass: int
    stop: bool

    def record(self) -> TraceStep:
        return TraceStep(len(self.X), self.chosen.t, self.chosen.size, self.points, self.mass, self.stop)


def _step(X: FiniteSet, V: FiniteSet, op: SetOp, k: Fraction, eps: Fraction) -> _Step:
    rep = rep_function(X, op, V)
    classes = dyadic_decompose(rep, k)
    chosen = dominant_class(rep, k, classes)
    counts = slope_counts(X, V, op, chosen.members)
    points = sum(counts.values())
    kept = kept_by_epsilon(counts, points, eps, len(X))
    mass = sum(counts[a] for a in kept)
    stop = meets_fraction(mass, points, k)
    return _Step(X, rep, classes, chosen, counts, points, X.keep(kept), mass, stop)


def _check_shrink(previous: _Step, eps: Fraction, index: int) -> None:
    size, kept = len(previous.X), len(previous.kept)
    if not kept > (1 - eps) * size:
        raise InvariantViolation(f"step {index} kept {kept} of {size} elements, not more than (1 - {eps}) * {size}.")


def _check_discard(previous: _Step, current: _Step, k: Fraction, index: int) -> None:
    """Energy left after a non-terminal step: at most ``1 - 2**-k / L(|A_i|)``
    of the previous energy for ``k >= 2``, ``1 - 1/(2 * classes)`` below that."""
    size = len(previous.X)
    if k >= 2:
        def factor(m):
            return 1 - (power_interval(2, k, m) * L_interval(size, m)).reciprocal()
    else:
        def factor(m):
            return Interval.point(1 - Fraction(1, 2 * len(previous.classes)))

    decision = decide(
        lambda m: energy_interval(current.rep, k, m),
        lambda m: factor(m) * energy_interval(previous.rep, k, m),
        "le",
    )
    if decision.holds is False:
        raise InvariantViolation(
            f"step {index} discarded too little energy: E(A_{index + 1}) in {decision.lhs} "
            f"exceeds the bound {decision.rhs}."
        )


def check_inputs(A: FiniteSet, V: FiniteSet, op, k, c1) -> tuple[SetOp, Fraction, Fraction]:
    op = SetOp(op)
    k = as_exponent(k)
    c1 = c1 if isinstance(c1, Fraction) else parse_rational(str(c1))
    if op not in DECOMPOSITION_OPS:
        raise ParameterError(f"decomposition runs on diff or ratio, got {op.value}.")
    if k <= 1:
        raise ParameterError(f"decomposition needs k > 1, got {k}.")
    if not 0 < c1 < 1:
        raise ParameterError(f"c1 must lie in (0, 1), got {c1}.")
    if len(A) < 4:
        raise ParameterError(f"decomposition needs |A| >= 4, got {len(A)}.")
    if not V:
        raise ParameterError("decomposition needs a non-empty V.")
    if not (A.is_exact and V.is_exact):
        raise BackendMismatch("decomposition runs on exact sets only.")
    check_operands(A, op, V)
    return op, k, c1


def check_epsilon(epsilon) -> Fraction:
    eps = epsilon if isinstance(epsilon, Fraction) else parse_rational(str(epsilon))
    if not 0 < eps < 1:
        raise ParameterError(f"epsilon must lie in (0, 1), got {eps}.")
    return eps


def decomp(A: FiniteSet, V: FiniteSet, op, k, c1, epsilon=None) -> DecompositionCertificate:
    """Run the iteration with the formula value of eps unless ``epsilon`` is given.

    A coarser ``epsilon`` discards elements much earlier, so the shrink steps
    can be followed on small sets; such a certificate fails the epsilon check.
    """
    op, k, c1 = check_inputs(A, V, op, k, c1)
    eps = choose_epsilon(len(A), k, c1) if epsilon is None else check_epsilon(epsilon)
    limit = math.ceil(c1 / eps)
    logger.info("Decomposing |A|=%s against |V|=%s (%s, k=%s, c1=%s): eps=%s, limit %s", len(A), len(V), op.value, k, c1, eps, limit)

    trace = []
    previous = None
    for index in range(limit):
        current = _step(previous.kept if previous else A, V, op, k, eps)
        if previous is not None:
            _check_discard(previous, current, k, index - 1)
        trace.append(current.record())
        logger.debug(
            "Step %s: |A_i|=%s t=%s |D|=%s |P|=%s |G|=%s stop=%s",
            index, len(current.X), current.chosen.t, current.chosen.size, current.points, current.mass, current.stop,
        )
        if current.stop:
            break
        _check_shrink(current, eps, index)
        previous = current
    else:
        raise InvariantViolation(f"decomposition did not stop within {limit} steps.")

    B = current.X
    threshold_exponent = k + 1
    C = B.keep(a for a in current.kept if meets_fraction(current.counts[a] * len(B), current.points, threshold_exponent))
    logger.info("Decomposition stopped after %s steps: |B|=%s |C|=%s t=%s", len(trace) - 1, len(B), len(C), current.chosen.t)
    return DecompositionCertificate(
        A, V, op, k, c1, eps, B, C, current.chosen.t, current.chosen.members, tuple(trace)
    )
