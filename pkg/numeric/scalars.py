import logging
import math
import re
from fractions import Fraction
from typing import Iterable, Union

import attrs
from django.conf import settings
from django.db import models

from .exceptions import BackendMismatch, DivisionByZero, DomainError, ParameterError

logger = logging.getLogger(__name__)

Exact = Union[int, Fraction]
Scalar = Union[int, Fraction, float]

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


class Backend(models.TextChoices):
    EXACT = "exact", "Exact rational"
    TOLERANT = "tolerant", "Tolerant float"


@attrs.frozen
class Tolerance:
    tau: float = attrs.field(converter=float)

    @tau.validator
    def _check_tau(self, attribute, value):
        if not math.isfinite(value) or value < 0:
            raise ParameterError(f"tolerance must be a finite number >= 0, got {value!r}.")


def default_tolerance() -> Tolerance:
    return Tolerance(getattr(settings, "ENERGYLAB_TOLERANCE", 1e-9))


def backend_of(x: Scalar) -> str:
    if isinstance(x, bool):
        raise ParameterError("booleans are not scalars.")
    if isinstance(x, float):
        return Backend.TOLERANT
    if isinstance(x, (int, Fraction)):
        return Backend.EXACT
    raise ParameterError(f"unsupported scalar type {type(x).__name__}.")


def canonical(x: Scalar) -> Scalar:
    """Stored form: integral rationals become ``int``, floats must be finite."""
    backend = backend_of(x)
    if backend == Backend.TOLERANT:
        if not math.isfinite(x):
            raise DomainError(f"non-finite value {x!r} cannot be stored.")
        return x + 0.0
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def as_fraction(x: Exact) -> Fraction:
    if backend_of(x) != Backend.EXACT:
        raise BackendMismatch(f"{x!r} is not an exact scalar.")
    return Fraction(x)


def to_float(x: Scalar) -> float:
    return float(x)


def _same_backend(a: Scalar, b: Scalar) -> str:
    ba, bb = backend_of(a), backend_of(b)
    if ba != bb:
        raise BackendMismatch(f"cannot combine {ba} value {a!r} with {bb} value {b!r}.")
    return ba


def add(a: Scalar, b: Scalar) -> Scalar:
    _same_backend(a, b)
    return canonical(a + b)


def sub(a: Scalar, b: Scalar) -> Scalar:
    _same_backend(a, b)
    return canonical(a - b)


def mul(a: Scalar, b: Scalar) -> Scalar:
    _same_backend(a, b)
    return canonical(a * b)


def div(a: Scalar, b: Scalar, tol: Tolerance = None) -> Scalar:
    backend = _same_backend(a, b)
    if backend == Backend.EXACT:
        if b == 0:
            raise DivisionByZero(f"division by zero: divisor of {format_scalar(a)} is 0.")
        return canonical(Fraction(a) / Fraction(b))
    tol = tol or default_tolerance()
    if abs(b) <= tol.tau:
        raise DivisionByZero(f"division by zero: divisor {b!r} is within tolerance {tol.tau!r} of 0.")
    return canonical(a / b)


def collide(a: float, b: float, tol: Tolerance = None) -> bool:
    if backend_of(a) != Backend.TOLERANT or backend_of(b) != Backend.TOLERANT:
        raise BackendMismatch("collision is only defined on the tolerant backend.")
    tol = tol or default_tolerance()
    return abs(a - b) <= tol.tau * max(1.0, abs(a), abs(b))


def merge_collisions(values: Iterable[float], tol: Tolerance = None) -> list[list[float]]:
    """Group sorted floats into chains of pairwise-adjacent collisions.

    Each group is represented by its smallest member; grouping depends only on
    the sorted order, so the result is deterministic even though collision is
    not transitive.
    """
    tol = tol or default_tolerance()
    groups: list[list[float]] = []
    for x in sorted(values):
        if groups and collide(groups[-1][-1], x, tol):
            groups[-1].append(x)
        else:
            groups.append([x])
    return groups


def parse_scalar(text: str) -> Scalar:
    """``"p/q"`` and integers are exact; decimal literals are tolerant."""
    m = _RATIONAL_RE.match(text)
    if m:
        num, den = m.group(1), m.group(2)
        if den is None:
            return int(num)
        if int(den) == 0:
            raise DivisionByZero(f"invalid rational {text.strip()!r}: zero denominator.")
        return canonical(Fraction(int(num), int(den)))
    try:
        value = float(text)
    except ValueError:
        raise ParameterError(f"cannot parse scalar {text.strip()!r}.") from None
    return canonical(value)


def format_scalar(x: Scalar) -> str:
    x = canonical(x)
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return str(x)


def parse_rational(text: str) -> Fraction:
    value = parse_scalar(str(text))
    if backend_of(value) != Backend.EXACT:
        raise ParameterError(f"{text!r} must be an exact rational (p/q or integer).")
    return Fraction(value)
