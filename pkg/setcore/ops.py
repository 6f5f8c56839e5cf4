import logging
import operator
from collections import Counter
from fractions import Fraction
from functools import cached_property
from collections.abc import Mapping
from typing import Iterator

from django.db import models

from numeric.exceptions import BackendMismatch, ZeroElementError
from numeric.scalars import Backend, Scalar, canonical, default_tolerance, format_scalar, merge_collisions

from .sets import FiniteSet, from_values

logger = logging.getLogger(__name__)


class SetOp(models.TextChoices):
    SUM = "sum", "A + B"
    DIFF = "diff", "A - B"
    PROD = "prod", "A * B"
    RATIO = "ratio", "A / B"

    @property
    def multiplicative(self) -> bool:
        return self in (SetOp.PROD, SetOp.RATIO)


def _exact_ratio(a, b):
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return Fraction(a) / Fraction(b)


_EXACT_OPS = {
    SetOp.SUM: operator.add,
    SetOp.DIFF: operator.sub,
    SetOp.PROD: operator.mul,
    SetOp.RATIO: _exact_ratio,
}

_FLOAT_OPS = {
    SetOp.SUM: operator.add,
    SetOp.DIFF: operator.sub,
    SetOp.PROD: operator.mul,
    SetOp.RATIO: operator.truediv,
}


def apply(op: SetOp, a: Scalar, b: Scalar) -> Scalar:
    """``a op b`` on one backend, canonicalised."""
    if isinstance(a, float):
        return _FLOAT_OPS[op](a, b)
    return canonical(_EXACT_OPS[op](a, b))


def check_operands(A: FiniteSet, op: SetOp, B: FiniteSet) -> None:
    if A.backend != B.backend:
        raise BackendMismatch(f"operands live on different backends ({A.backend} and {B.backend}).")
    if SetOp(op).multiplicative:
        for name, S in (("left", A), ("right", B)):
            if 0 in S:
                raise ZeroElementError(f"{SetOp(op).label} is undefined here: 0 is an element of the {name} operand.")


class RepFunction(Mapping):
    """Histogram ``x -> r(x)`` of the representations of ``x`` as ``a op b``.

    Off-support values map to 0. Instances are immutable once built.
    """

    def __init__(self, op: SetOp, counts: Mapping, backend: str = Backend.EXACT):
        self.op = SetOp(op)
        self.backend = backend
        self._counter = Counter({key: count for key, count in counts.items() if count > 0})

    def __getitem__(self, key) -> int:
        return self._counter.get(key, 0)

    def __iter__(self) -> Iterator:
        return iter(self._counter)

    def __len__(self) -> int:
        return len(self._counter)

    def __contains__(self, key) -> bool:
        return key in self._counter

    def __repr__(self) -> str:
        items = ", ".join(f"{format_scalar(k)}: {v}" for k, v in sorted(self._counter.items()))
        return f"{self.__class__.__name__}({self.op.value}, {{{items}}})"

    @cached_property
    def total(self) -> int:
        return sum(self._counter.values())

    @cached_property
    def max_count(self) -> int:
        return max(self._counter.values(), default=0)

    @cached_property
    def multiplicities(self) -> Counter:
        """How many support points carry each representation count."""
        return Counter(self._counter.values())

    def support(self) -> FiniteSet:
        return FiniteSet(tuple(sorted(self._counter)), self.backend)

    def restricted_to(self, values) -> "RepFunction":
        return RepFunction(self.op, {x: self._counter[x] for x in values if x in self._counter}, self.backend)


def rep_function(A: FiniteSet, op: SetOp, B: FiniteSet, tol=None) -> RepFunction:
    """Exact multiplicity histogram of ``a op b`` over ``A x B``."""
    op = SetOp(op)
    check_operands(A, op, B)
    if A.backend == Backend.EXACT:
        fn = _EXACT_OPS[op]
        counter = Counter(fn(a, b) for a in A for b in B)
        return RepFunction(op, {canonical(k): v for k, v in counter.items()}, Backend.EXACT)
    fn = _FLOAT_OPS[op]
    groups = merge_collisions((fn(a, b) for a in A for b in B), tol or default_tolerance())
    return RepFunction(op, {group[0]: len(group) for group in groups}, Backend.TOLERANT)


def combine(A: FiniteSet, op: SetOp, B: FiniteSet, tol=None) -> FiniteSet:
    """The set ``{a op b : a in A, b in B}``."""
    op = SetOp(op)
    check_operands(A, op, B)
    if A.backend == Backend.EXACT:
        fn = _EXACT_OPS[op]
        return from_values({fn(a, b) for a in A for b in B}, Backend.EXACT)
    return rep_function(A, op, B, tol).support()
