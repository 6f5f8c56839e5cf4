from fractions import Fraction

import attrs

from numeric.exceptions import ParameterError
from numeric.scalars import parse_rational


@attrs.frozen
class ExponentBound:
    """``|X| >= |A|**const * E**energy`` written as its two exponents."""

    const: Fraction = attrs.field(converter=Fraction)
    energy: Fraction = attrs.field(converter=Fraction)

    def at(self, x: Fraction) -> Fraction:
        return self.const + x * self.energy


def parse_bound(text: str) -> ExponentBound:
    """``"13/6:-1/6"`` -> ``ExponentBound(13/6, -1/6)``."""
    parts = text.split(":")
    if len(parts) != 2:
        raise ParameterError(f"an exponent bound is written const:energy, got {text!r}.")
    return ExponentBound(*(parse_rational(p) for p in parts))


def balance_exponents(b1: ExponentBound, b2: ExponentBound) -> tuple[Fraction, Fraction]:
    """Energy exponent ``x`` where the two bounds meet, and their common value.

    With one bound increasing and the other decreasing in ``x``, the maximum
    of the two is smallest at the crossing.
    """
    if b1.energy == b2.energy:
        raise ParameterError(f"bounds {b1} and {b2} are parallel; they never cross.")
    if b1.energy * b2.energy >= 0:
        raise ParameterError("the energy exponents must have opposite signs.")
    x = (b2.const - b1.const) / (b1.energy - b2.energy)
    return x, b1.at(x)


def specialise_exponent(lhs_power, rhs_power) -> Fraction:
    """``y`` solving ``lhs_power * y = rhs_power``."""
    lhs_power, rhs_power = Fraction(lhs_power), Fraction(rhs_power)
    if lhs_power == 0:
        raise ParameterError("cannot specialise against a zero power.")
    return rhs_power / lhs_power
