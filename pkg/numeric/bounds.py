"""Exact rational enclosures for the irrational quantities in the bound checks.

Inequalities such as ``E_k(B, V) <= 2**k * |D| * t**k * L(|B|)`` with a
fractional ``k`` involve powers, base-2 logarithms and ``ln 2``. Instead of
comparing floats, each side is enclosed in an :class:`Interval` of
rationals and the enclosure is refined until the comparison is decided.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Union

import attrs
from django.conf import settings

from .exceptions import DivisionByZero, DomainError, ParameterError

logger = logging.getLogger(__name__)

PRECISION_SCHEDULE = (64, 256, 1024, 4096)

RELATIONS = ("le", "lt", "ge", "gt")


def _frac(value) -> Fraction:
    if isinstance(value, float):
        raise ParameterError(f"interval endpoints must be exact, got float {value!r}.")
    return Fraction(value)


@attrs.frozen
class Interval:
    lo: Fraction = attrs.field(converter=_frac)
    hi: Fraction = attrs.field(converter=_frac)

    def __attrs_post_init__(self):
        if self.lo > self.hi:
            raise ParameterError(f"empty interval [{self.lo}, {self.hi}].")

    @classmethod
    def point(cls, value) -> "Interval":
        return cls(value, value)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __add__(self, other):
        other = as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        other = as_interval(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return as_interval(other) - self

    def __mul__(self, other):
        other = as_interval(other)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0 <= self.hi:
            raise DivisionByZero(f"interval [{self.lo}, {self.hi}] contains 0.")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        return self * as_interval(other).reciprocal()

    def __rtruediv__(self, other):
        return as_interval(other) * self.reciprocal()

    def maximum(self, other) -> "Interval":
        other = as_interval(other)
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    def __str__(self):
        if self.is_point:
            return _fmt(self.lo)
        return f"[{_fmt(self.lo)}, {_fmt(self.hi)}]"


def _fmt(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def as_interval(value) -> Interval:
    if isinstance(value, Interval):
        return value
    return Interval.point(value)


def iroot(n: int, q: int) -> tuple[int, bool]:
    """Floor of the ``q``-th root of ``n`` and whether it is exact.

    Integer Newton iteration started above the root, so the sequence
    decreases monotonically onto the floor.
    """
    if q < 1 or n < 0:
        raise DomainError(f"iroot needs n >= 0 and q >= 1, got n={n}, q={q}.")
    if q == 1 or n < 2:
        return n, True
    x = 1 << -(-n.bit_length() // q)
    while True:
        y = ((q - 1) * x + n // x ** (q - 1)) // q
        if y >= x:
            break
        x = y
    return x, x**q == n


def power_interval(base, k, m: int) -> Interval:
    """Enclosure of ``base ** k`` for rationals ``base >= 0`` and ``k >= 0``.

    The result is a point whenever the power is itself rational.
    """
    base, k = Fraction(base), Fraction(k)
    if base < 0 or k < 0:
        raise DomainError(f"power_interval needs base >= 0 and k >= 0, got {base}, {k}.")
    if k == 0:
        return Interval.point(1)
    if base == 0:
        return Interval.point(0)
    p, q = k.numerator, k.denominator
    raised = base**p
    num, den = raised.numerator, raised.denominator
    rn, exact_n = iroot(num, q)
    rd, exact_d = iroot(den, q)
    if exact_n and exact_d:
        return Interval.point(Fraction(rn, rd))
    shift = q * (4 * m.bit_length() + 8)
    rn, _ = iroot(num << shift, q)
    rd, _ = iroot(den << shift, q)
    return Interval(Fraction(rn, rd + 1), Fraction(rn + 1, rd))


def _log2_int(n: int, m: int) -> Interval:
    if n & (n - 1) == 0:
        return Interval.point(n.bit_length() - 1)
    bl = (n**m).bit_length()
    return Interval(Fraction(bl - 1, m), Fraction(bl, m))


def log2_interval(x, m: int) -> Interval:
    """Enclosure of ``log2(x)`` of width at most ``2/m``; exact on powers of two."""
    x = Fraction(x)
    if x <= 0:
        raise DomainError(f"log2 of non-positive value {x}.")
    return _log2_int(x.numerator, m) - _log2_int(x.denominator, m)


def L_interval(x, m: int) -> Interval:
    """Enclosure of ``L(x) = max(1, log2 x)``."""
    return log2_interval(x, m).maximum(1)


@lru_cache(maxsize=None)
def ln2_interval(m: int) -> Interval:
    terms = m.bit_length() + 1
    total = sum(Fraction(1, j << j) for j in range(1, terms + 1))
    return Interval(total, total + Fraction(1, (terms + 1) << terms))


def ln_interval(y, m: int) -> Interval:
    return log2_interval(y, m) * ln2_interval(m)


def max_precision() -> int:
    return int(getattr(settings, "ENERGYLAB_MAX_PRECISION", PRECISION_SCHEDULE[-1]))


Term = Union[int, Fraction, Interval, Callable[[int], Interval]]


def enclose(term: Term, m: int) -> Interval:
    if callable(term):
        return as_interval(term(m))
    return as_interval(term)


@attrs.frozen
class Decision:
    relation: str
    holds: Optional[bool]
    lhs: Interval
    rhs: Interval
    precision: int

    @property
    def decided(self) -> bool:
        return self.holds is not None


def _compare(lhs: Interval, rhs: Interval, relation: str) -> Optional[bool]:
    if relation == "le":
        if lhs.hi <= rhs.lo:
            return True
        if lhs.lo > rhs.hi:
            return False
    elif relation == "lt":
        if lhs.hi < rhs.lo:
            return True
        if lhs.lo >= rhs.hi:
            return False
    elif relation == "ge":
        return _compare(rhs, lhs, "le")
    elif relation == "gt":
        return _compare(rhs, lhs, "lt")
    else:
        raise ParameterError(f"unknown relation {relation!r}; expected one of {RELATIONS}.")
    return None


def decide(lhs: Term, rhs: Term, relation: str = "le") -> Decision:
    """Decide ``lhs <relation> rhs`` exactly, refining enclosures as needed."""
    cap = max_precision()
    schedule = [m for m in PRECISION_SCHEDULE if m <= cap] or [cap]
    decision = None
    for m in schedule:
        left, right = enclose(lhs, m), enclose(rhs, m)
        decision = Decision(relation, _compare(left, right, relation), left, right, m)
        if decision.decided:
            return decision
    logger.warning(
        "Comparison left undecided at precision %s: %s %s %s", cap, decision.lhs, relation, decision.rhs
    )
    return decision
