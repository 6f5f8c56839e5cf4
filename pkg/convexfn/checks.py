from fractions import Fraction

from numeric.exceptions import DomainError, ParameterError
from numeric.scalars import Backend, backend_of, format_scalar
from setcore.sets import FiniteSet

from .registry import ConvexFn, Kind


def divided_differences(xs, ys) -> list:
    return [(y1 - y0) / (x1 - x0) for x0, x1, y0, y1 in zip(xs, xs[1:], ys, ys[1:])]


def classify_slopes(slopes) -> Kind:
    if all(s0 < s1 for s0, s1 in zip(slopes, slopes[1:])):
        return Kind.CONVEX
    if all(s0 > s1 for s0, s1 in zip(slopes, slopes[1:])):
        return Kind.CONCAVE
    return Kind.NEITHER


def validate_strict(f: ConvexFn, X: FiniteSet) -> Kind:
    """Classify ``f`` on ``X`` from its first divided differences."""
    if len(X) < 3:
        raise ParameterError(f"strict convexity needs at least 3 points, got {len(X)}.")
    for x in X:
        if x not in f.domain:
            raise DomainError(f"{format_scalar(x)} is outside the domain {f.domain} of {f}.")
    xs = list(X)
    ys = [f.evaluate(x) for x in xs]
    if X.backend == Backend.TOLERANT or any(backend_of(y) == Backend.TOLERANT for y in ys):
        xs, ys = [float(x) for x in xs], [float(y) for y in ys]
    else:
        xs, ys = [Fraction(x) for x in xs], [Fraction(y) for y in ys]
    return classify_slopes(divided_differences(xs, ys))
