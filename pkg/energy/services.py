import itertools
import logging
import math
from fractions import Fraction
from typing import Union

import attrs
from django.conf import settings

from numeric.bounds import Decision, Interval, decide, power_interval
from numeric.exceptions import ParameterError, SizeGuardExceeded
from numeric.scalars import parse_rational
from setcore.ops import RepFunction, SetOp, apply, check_operands, rep_function
from setcore.sets import FiniteSet

logger = logging.getLogger(__name__)

Number = Union[int, float]


def as_exponent(k) -> Fraction:
    k = k if isinstance(k, Fraction) else parse_rational(str(k))
    if k < 1:
        raise ParameterError(f"energies need an exponent k >= 1, got {k}.")
    return k


def power_sum(multiplicities, k: Fraction) -> Number:
    """``sum(count * r**k)`` over a ``{r: count}`` table.

    Exact for integer ``k``; a correctly rounded float sum otherwise.
    """
    if k.denominator == 1:
        e = k.numerator
        return sum(count * r**e for r, count in multiplicities.items())
    exponent = float(k)
    return math.fsum(count * float(r) ** exponent for r, count in sorted(multiplicities.items()))


@attrs.frozen
class EnergyValue:
    k: Fraction
    value: Number
    op: SetOp
    support_size: int

    @property
    def exact(self) -> bool:
        return isinstance(self.value, int)


@attrs.frozen
class DyadicClass:
    """Support points whose representation count lies in ``[t, 2t)``."""

    t: int
    members: FiniteSet
    contribution: Number
    k: Fraction

    @property
    def size(self) -> int:
        return len(self.members)


def energy_of(rep: RepFunction, k) -> EnergyValue:
    k = as_exponent(k)
    return EnergyValue(k, power_sum(rep.multiplicities, k), rep.op, len(rep))


def energy(A: FiniteSet, B: FiniteSet, k, op: SetOp = SetOp.DIFF) -> EnergyValue:
    """``E_k(A, B) = sum_x r_{A op B}(x)**k``."""
    k = as_exponent(k)
    return energy_of(rep_function(A, op, B), k)


def restricted_energy(rep: RepFunction, D, k) -> EnergyValue:
    k = as_exponent(k)
    counts = {}
    for x in D:
        r = rep[x]
        if r:
            counts[r] = counts.get(r, 0) + 1
    return EnergyValue(k, power_sum(counts, k), rep.op, sum(counts.values()))


def mixed_sum(rep1: RepFunction, rep2: RepFunction) -> int:
    """``sum_t rep1(t)**2 * rep2(t)``."""
    return sum(r * r * rep2[x] for x, r in rep1.items())


def energy_interval(rep: RepFunction, k, m: int) -> Interval:
    k = as_exponent(k)
    total = Interval.point(0)
    for r, count in sorted(rep.multiplicities.items()):
        total = total + power_interval(r, k, m) * count
    return total


def dyadic_decompose(rep: RepFunction, k) -> list[DyadicClass]:
    """Split the support by representation count into ``[2**i, 2**(i+1))`` bands."""
    k = as_exponent(k)
    if not len(rep):
        raise ParameterError("cannot decompose an empty representation function.")
    bands: dict[int, list] = {}
    for x, r in rep.items():
        bands.setdefault(1 << (r.bit_length() - 1), []).append(x)
    classes = []
    for t in sorted(bands):
        members = sorted(bands[t])
        counts = {}
        for x in members:
            counts[rep[x]] = counts.get(rep[x], 0) + 1
        classes.append(DyadicClass(t, FiniteSet(tuple(members), rep.backend), power_sum(counts, k), k))
    return classes


def dominant_class(rep: RepFunction, k, classes=None) -> DyadicClass:
    """The class with the largest contribution; ties go to larger ``t``, then larger ``|D_t|``."""
    classes = classes or dyadic_decompose(rep, k)
    return max(classes, key=lambda c: (c.contribution, c.t, c.size))


@attrs.frozen
class Sandwich:
    lower: Decision
    upper: Decision
    class_count: int

    @property
    def holds(self) -> bool:
        return bool(self.lower.holds and self.upper.holds)


def check_sandwich(rep: RepFunction, k, chosen: DyadicClass) -> Sandwich:
    """``|D_t| t**k <= E_k <= 2**k |D_t| t**k * L`` with ``L`` the number of dyadic classes."""
    k = as_exponent(k)
    count = len(dyadic_decompose(rep, k))

    def peak(m):
        return power_interval(chosen.t, k, m) * chosen.size

    def ceiling(m):
        return power_interval(2, k, m) * peak(m) * count

    def total(m):
        return energy_interval(rep, k, m)

    return Sandwich(decide(peak, total, "le"), decide(total, ceiling, "le"), count)


def oracle_limit() -> int:
    return int(getattr(settings, "ENERGYLAB_ORACLE_LIMIT", 12))


def brute_force_energy(A: FiniteSet, B: FiniteSet, k: int, op: SetOp = SetOp.DIFF, limit: int = None) -> int:
    """Count ``2k``-tuples with ``a_1 op b_1 = ... = a_k op b_k`` by enumeration."""
    limit = oracle_limit() if limit is None else limit
    if max(len(A), len(B)) > limit:
        raise SizeGuardExceeded(f"brute-force energy is limited to sets of size {limit}.")
    if int(k) != k or k < 1:
        raise ParameterError(f"the tuple oracle needs an integer k >= 1, got {k}.")
    op = SetOp(op)
    check_operands(A, op, B)
    values = [apply(op, a, b) for a in A for b in B]
    return sum(1 for combo in itertools.product(values, repeat=int(k)) if all(v == combo[0] for v in combo))
