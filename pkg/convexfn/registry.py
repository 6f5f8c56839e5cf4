"""Closed registry of strictly convex and concave functions.

Base tags are evaluated exactly whenever the result is rational; ``exp``,
``log`` and irrational powers fall back to the tolerant backend. New
functions are built only by negation (``neg:``) and inversion (``inv:``), so
every registered function has a known domain, range, kind and inverse.
"""

import logging
import math
from fractions import Fraction
from typing import Optional

import attrs
from django.db import models

from numeric.bounds import iroot
from numeric.exceptions import DomainError, ParameterError
from numeric.scalars import Backend, Scalar, backend_of, canonical, format_scalar, parse_rational

logger = logging.getLogger(__name__)


class Kind(models.TextChoices):
    CONVEX = "convex", "Convex"
    CONCAVE = "concave", "Concave"
    NEITHER = "neither", "Neither"

    def flipped(self) -> "Kind":
        if self == Kind.CONVEX:
            return Kind.CONCAVE
        if self == Kind.CONCAVE:
            return Kind.CONVEX
        return self


@attrs.frozen
class Domain:
    """A real interval; ``None`` bounds are infinite."""

    lower: Optional[Fraction] = None
    lower_open: bool = False
    upper: Optional[Fraction] = None
    upper_open: bool = False

    def __contains__(self, x) -> bool:
        if self.lower is not None and (x < self.lower or (self.lower_open and x == self.lower)):
            return False
        if self.upper is not None and (x > self.upper or (self.upper_open and x == self.upper)):
            return False
        return True

    def negated(self) -> "Domain":
        return Domain(
            lower=None if self.upper is None else -self.upper,
            lower_open=self.upper_open,
            upper=None if self.lower is None else -self.lower,
            upper_open=self.lower_open,
        )

    def __str__(self):
        left = "(" if self.lower is None or self.lower_open else "["
        right = ")" if self.upper is None or self.upper_open else "]"
        lo = "-inf" if self.lower is None else format_scalar(self.lower)
        hi = "inf" if self.upper is None else format_scalar(self.upper)
        return f"{left}{lo}, {hi}{right}"


REALS = Domain()
NONNEGATIVE = Domain(lower=Fraction(0))
POSITIVE = Domain(lower=Fraction(0), lower_open=True)

# tag -> (domain, range, kind, increasing, takes a parameter)
_BASE = {
    "square": (NONNEGATIVE, NONNEGATIVE, Kind.CONVEX, True, False),
    "sqrt": (NONNEGATIVE, NONNEGATIVE, Kind.CONCAVE, True, False),
    "cube+": (NONNEGATIVE, NONNEGATIVE, Kind.CONVEX, True, False),
    "cbrt": (NONNEGATIVE, NONNEGATIVE, Kind.CONCAVE, True, False),
    "pow": (NONNEGATIVE, NONNEGATIVE, Kind.CONVEX, True, True),
    "root": (NONNEGATIVE, NONNEGATIVE, Kind.CONCAVE, True, True),
    "exp": (REALS, POSITIVE, Kind.CONVEX, True, False),
    "log": (POSITIVE, REALS, Kind.CONCAVE, True, False),
    "recip+": (POSITIVE, POSITIVE, Kind.CONVEX, False, False),
}

_BASE_INVERSE = {
    "square": "sqrt",
    "sqrt": "square",
    "cube+": "cbrt",
    "cbrt": "cube+",
    "pow": "root",
    "root": "pow",
    "exp": "log",
    "log": "exp",
    "recip+": "recip+",
}


def _check_param(instance, attribute, value):
    takes_param = instance.tag in _BASE and _BASE[instance.tag][4]
    if takes_param and (value is None or value <= 1):
        raise ParameterError(f"{instance.tag}:p needs a rational p > 1, got {value}.")
    if not takes_param and value is not None:
        raise ParameterError(f"{instance.tag} takes no parameter.")


def _check_inner(instance, attribute, value):
    if instance.tag in ("neg", "inv") and value is None:
        raise ParameterError(f"{instance.tag}: needs an inner function.")
    if instance.tag not in ("neg", "inv") and instance.tag not in _BASE:
        raise ParameterError(f"unknown function tag {instance.tag!r}.")


@attrs.frozen
class ConvexFn:
    tag: str
    param: Optional[Fraction] = attrs.field(default=None, validator=_check_param)
    inner: Optional["ConvexFn"] = attrs.field(default=None, validator=_check_inner)

    @property
    def domain(self) -> Domain:
        if self.tag == "neg":
            return self.inner.domain
        if self.tag == "inv":
            return self.inner.range
        return _BASE[self.tag][0]

    @property
    def range(self) -> Domain:
        if self.tag == "neg":
            return self.inner.range.negated()
        if self.tag == "inv":
            return self.inner.domain
        return _BASE[self.tag][1]

    @property
    def increasing(self) -> bool:
        if self.tag == "neg":
            return not self.inner.increasing
        if self.tag == "inv":
            return self.inner.increasing
        return _BASE[self.tag][3]

    @property
    def kind(self) -> Kind:
        if self.tag == "neg":
            return self.inner.kind.flipped()
        if self.tag == "inv":
            return self.inner.kind.flipped() if self.inner.increasing else self.inner.kind
        return _BASE[self.tag][2]

    def __str__(self):
        if self.inner is not None:
            return f"{self.tag}:{self.inner}"
        if self.param is not None:
            return f"{self.tag}:{format_scalar(canonical(self.param))}"
        return self.tag

    def evaluate(self, x: Scalar) -> Scalar:
        if x not in self.domain:
            raise DomainError(f"{format_scalar(x)} is outside the domain {self.domain} of {self}.")
        if self.tag == "neg":
            return canonical(-self.inner.evaluate(x))
        if self.tag == "inv":
            return _evaluate_inverse(self.inner, x)
        return _evaluate_base(self.tag, self.param, x)

    __call__ = evaluate


def _exact_power(x: Fraction, k: Fraction) -> Optional[Fraction]:
    """``x ** k`` when it is rational, else ``None``."""
    raised = x**k.numerator
    num, exact_num = iroot(raised.numerator, k.denominator)
    den, exact_den = iroot(raised.denominator, k.denominator)
    if exact_num and exact_den:
        return Fraction(num, den)
    return None


def _power(x: Scalar, k: Fraction) -> Scalar:
    if backend_of(x) == Backend.EXACT:
        value = _exact_power(Fraction(x), k)
        if value is not None:
            return canonical(value)
        logger.debug("x**%s is irrational at x=%s; using the tolerant backend", k, format_scalar(x))
    return canonical(float(x) ** float(k))


def _evaluate_base(tag: str, param: Optional[Fraction], x: Scalar) -> Scalar:
    if tag == "square":
        return canonical(x * x)
    if tag == "cube+":
        return canonical(x * x * x)
    if tag == "sqrt":
        return _power(x, Fraction(1, 2))
    if tag == "cbrt":
        return _power(x, Fraction(1, 3))
    if tag == "pow":
        return _power(x, param)
    if tag == "root":
        return _power(x, 1 / param)
    if tag == "recip+":
        if backend_of(x) == Backend.EXACT:
            return canonical(1 / Fraction(x))
        return 1.0 / x
    if tag == "exp":
        try:
            return canonical(math.exp(float(x)))
        except OverflowError:
            raise DomainError(f"exp({format_scalar(x)}) overflows the tolerant backend.") from None
    if tag == "log":
        return canonical(math.log(float(x)))
    raise ParameterError(f"unknown function tag {tag!r}.")


def _evaluate_inverse(f: ConvexFn, y: Scalar) -> Scalar:
    if f.tag == "inv":
        return f.inner.evaluate(y)
    if f.tag == "neg":
        return _evaluate_inverse(f.inner, canonical(-y))
    return _evaluate_base(_BASE_INVERSE[f.tag], f.param, y)


def inverse(f: ConvexFn) -> ConvexFn:
    """The compositional inverse, kept inside the registry."""
    if f.tag == "inv":
        return f.inner
    if f.tag in _BASE_INVERSE:
        return ConvexFn(_BASE_INVERSE[f.tag], f.param)
    return ConvexFn("inv", inner=f)


def parse_function(spec: str) -> ConvexFn:
    """Parse ``square``, ``cube+``, ``pow:3/2``, ``exp``, ``inv:<spec>`` and friends."""
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    if head in ("neg", "inv"):
        if not rest:
            raise ParameterError(f"{head}: needs an inner function spec.")
        inner = parse_function(rest)
        return inverse(inner) if head == "inv" else ConvexFn("neg", inner=inner)
    if head not in _BASE:
        raise ParameterError(f"unknown function spec {spec!r}.")
    if _BASE[head][4]:
        if not rest:
            raise ParameterError(f"{head}:p needs an exponent, e.g. {head}:3/2.")
        return ConvexFn(head, parse_rational(rest))
    if rest:
        raise ParameterError(f"{head} takes no parameter, got {spec!r}.")
    return ConvexFn(head)
