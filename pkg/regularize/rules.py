"""Refinement by a deterministic rule until the energy stops dropping.

A rule maps a set ``X`` to a subset ``R(X)`` of size at least ``(1 - eps)|X|``.
:func:`regu_refine` replaces ``B`` by ``R(B)`` while ``E_m(R(B))`` falls below
``c2 * E_m(B)``. Since ``|X|**2 <= E_m(X) <= |X|**(m + 1)``, the choice of
``c2`` below rules out more than ``floor(c1/eps) - 1`` replacements, so the
result keeps at least ``(1 - c1)|A|`` elements.
"""

import logging
import math
from fractions import Fraction
from typing import Callable

import attrs

from claims.popular import popular_set, refined_set
from energy.services import as_exponent, energy
from numeric.bounds import L_interval
from numeric.exceptions import InvariantViolation, ParameterError
from numeric.scalars import parse_rational
from setcore.ops import SetOp
from setcore.sets import FiniteSet

logger = logging.getLogger(__name__)

RULE_PRECISION = 256

ROUNDING_MARGIN = 1 - 1e-12


@attrs.frozen
class RefinementRule:
    name: str
    refine: Callable[[FiniteSet, Fraction], FiniteSet] = attrs.field(eq=False)

    def __call__(self, X: FiniteSet, eps: Fraction) -> FiniteSet:
        return self.refine(X, eps)

    def __str__(self):
        return self.name


def _drop_largest(X: FiniteSet, eps: Fraction) -> FiniteSet:
    if X and eps * len(X) >= 1:
        return X.without([X[-1]])
    return X


IDENTITY = RefinementRule("identity", lambda X, eps: X)

DROP_LARGEST = RefinementRule("drop_largest", _drop_largest)


def popular_sum(C: FiniteSet) -> RefinementRule:
    """Keep the elements of ``X`` that land in ``P(X, C)`` for half of ``C``."""

    def refine(X: FiniteSet, eps: Fraction) -> FiniteSet:
        if len(X) < 2:
            return X
        return refined_set(X, C, popular_set(X, C))

    return RefinementRule(f"popular_sum({C})", refine)


@attrs.frozen
class Refinement:
    subset: FiniteSet
    epsilon: Fraction
    c2: float
    max_steps: int
    energies: tuple
    rule: str

    @property
    def steps(self) -> int:
        return len(self.energies) - 1


def _check_rule(rule: RefinementRule, X: FiniteSet, R: FiniteSet, eps: Fraction, step: int) -> None:
    if not R.issubset(X):
        raise InvariantViolation(f"rule {rule} returned a set that is not a subset of its input at step {step}.")
    if len(R) < (1 - eps) * len(X):
        raise InvariantViolation(
            f"rule {rule} kept {len(R)} of {len(X)} elements at step {step}, "
            f"below the guaranteed (1 - {eps}) * {len(X)}."
        )


def regu_refine(A: FiniteSet, rule: RefinementRule, m, c1) -> Refinement:
    m = as_exponent(m)
    c1 = c1 if isinstance(c1, Fraction) else parse_rational(str(c1))
    if m <= 1:
        raise ParameterError(f"refinement needs an energy exponent m > 1, got {m}.")
    if not 0 < c1 < 1:
        raise ParameterError(f"c1 must lie in (0, 1), got {c1}.")
    if not A:
        raise ParameterError("cannot refine the empty set.")
    log_bound = L_interval(len(A), RULE_PRECISION).hi
    eps = c1 / log_bound
    max_steps = math.floor(c1 / eps)
    c2 = ((1 - float(c1)) ** 2 * len(A) ** (1 - float(m))) ** (1 / max_steps) * ROUNDING_MARGIN

    def E(X: FiniteSet) -> float:
        return float(energy(X, X, m, SetOp.DIFF).value)

    B = A
    energies = [E(B)]
    for step in range(max_steps):
        R = rule(B, eps)
        _check_rule(rule, B, R, eps, step)
        refined_energy = E(R)
        logger.debug("Refinement step %s: |B|=%s, |R(B)|=%s, E=%s -> %s", step, len(B), len(R), energies[-1], refined_energy)
        if refined_energy >= c2 * energies[-1]:
            break
        B = R
        energies.append(refined_energy)
    else:
        raise InvariantViolation(f"refinement with rule {rule} did not settle within {max_steps} steps.")
    if len(B) < (1 - c1) * len(A):
        raise InvariantViolation(f"refined set has {len(B)} elements, fewer than (1 - {c1}) * {len(A)}.")
    logger.info("Rule %s settled after %s replacements with |B|=%s", rule, len(energies) - 1, len(B))
    return Refinement(B, eps, c2, max_steps, tuple(energies), rule.name)
