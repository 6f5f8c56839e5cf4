import bisect
import logging
from fractions import Fraction
from collections.abc import Sequence
from typing import Iterable, Iterator

import attrs

from numeric.exceptions import (
    BackendMismatch,
    InvariantViolation,
    ParameterError,
    ZeroElementError,
)
from numeric.scalars import (
    Backend,
    Scalar,
    Tolerance,
    backend_of,
    canonical,
    default_tolerance,
    format_scalar,
    merge_collisions,
)

logger = logging.getLogger(__name__)


def _check_elements(instance, attribute, value):
    for x in value:
        if backend_of(x) != instance.backend:
            raise BackendMismatch(f"element {x!r} does not belong to the {instance.backend} backend.")
    for left, right in zip(value, value[1:]):
        if not left < right:
            raise ParameterError(f"set elements must be strictly increasing ({left!r} >= {right!r}).")


@attrs.frozen
class FiniteSet(Sequence):
    """A sorted, duplicate-free set of scalars from a single backend."""

    elements: tuple = attrs.field(converter=tuple, validator=_check_elements)
    backend: str = Backend.EXACT

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.elements)

    def __getitem__(self, index):
        return self.elements[index]

    def __contains__(self, value) -> bool:
        i = bisect.bisect_left(self.elements, value)
        return i < len(self.elements) and self.elements[i] == value

    def __str__(self):
        return "{" + ", ".join(format_scalar(x) for x in self.elements) + "}"

    @property
    def is_exact(self) -> bool:
        return self.backend == Backend.EXACT

    def issubset(self, other: "FiniteSet") -> bool:
        return all(x in other for x in self.elements)

    def without(self, values: Iterable[Scalar]) -> "FiniteSet":
        drop = set(values)
        return FiniteSet(tuple(x for x in self.elements if x not in drop), self.backend)

    def keep(self, values: Iterable[Scalar]) -> "FiniteSet":
        wanted = set(values)
        return FiniteSet(tuple(x for x in self.elements if x in wanted), self.backend)

    def reciprocal(self) -> "FiniteSet":
        return reciprocal(self)


EMPTY = FiniteSet(())


def from_values(values: Iterable[Scalar], backend: str = None, tol: Tolerance = None) -> FiniteSet:
    """Sort and deduplicate ``values``; tolerant values are collision-merged."""
    values = [canonical(v) for v in values]
    backends = {backend_of(v) for v in values}
    if len(backends) > 1:
        raise BackendMismatch("cannot build a set from mixed exact and tolerant values.")
    if backends:
        found = backends.pop()
        if backend is not None and backend != found:
            raise BackendMismatch(f"expected {backend} values, got {found} values.")
        backend = found
    backend = backend or Backend.EXACT
    if backend == Backend.EXACT:
        return FiniteSet(tuple(sorted(set(values))), backend)
    groups = merge_collisions(values, tol or default_tolerance())
    return FiniteSet(tuple(group[0] for group in groups), backend)


def promote(A: FiniteSet, backend: str) -> FiniteSet:
    if A.backend == backend:
        return A
    if backend == Backend.TOLERANT:
        logger.info("Promoting a set of %s elements to the tolerant backend", len(A))
        return from_values((float(x) for x in A), Backend.TOLERANT)
    raise ParameterError("tolerant sets cannot be converted back to the exact backend.")


def affine(A: FiniteSet, lam: Scalar, mu: Scalar = 0) -> FiniteSet:
    """The set ``{lam * a + mu}``."""
    if lam == 0:
        raise ParameterError("affine map needs a non-zero dilation factor.")
    if A.backend == Backend.TOLERANT:
        lam, mu = float(lam), float(mu)
    elif backend_of(lam) != Backend.EXACT or backend_of(mu) != Backend.EXACT:
        raise BackendMismatch("exact sets need exact affine coefficients.")
    result = from_values((lam * a + mu for a in A), A.backend)
    if len(result) != len(A):
        raise InvariantViolation(f"affine map lost elements ({len(A)} -> {len(result)}).")
    return result


def shift(A: FiniteSet, mu: Scalar) -> FiniteSet:
    return affine(A, 1, mu)


def reciprocal(A: FiniteSet) -> FiniteSet:
    if 0 in A:
        raise ZeroElementError("the reciprocal set is undefined when 0 is an element.")
    if A.backend == Backend.EXACT:
        return from_values(Fraction(1) / Fraction(a) for a in A)
    return from_values((1.0 / a for a in A), Backend.TOLERANT)


def image(A: FiniteSet, f) -> FiniteSet:
    """``{f(a) : a in A}`` for a registered convex or concave function ``f``.

    Values that leave the exact backend pull the whole image onto the
    tolerant backend.
    """
    values = [f.evaluate(a) for a in A]
    if any(backend_of(v) == Backend.TOLERANT for v in values):
        if A.backend == Backend.EXACT:
            logger.info("Image of %s left the exact backend; switching to tolerant values", f)
        values = [float(v) for v in values]
    result = from_values(values)
    if len(result) != len(A):
        raise InvariantViolation(
            f"{f} is strictly monotone but its image has {len(result)} elements for {len(A)} inputs."
        )
    return result
