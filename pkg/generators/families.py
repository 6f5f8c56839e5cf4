import logging
from fractions import Fraction
from pathlib import Path
from typing import Optional

import attrs
from django.conf import settings
from django.db import models

from convexfn.registry import ConvexFn, parse_function
from numeric.exceptions import ParameterError
from numeric.scalars import format_scalar, parse_rational
from setcore.files import read_set_file
from setcore.sets import FiniteSet, from_values, image

from .rng import SplitMix64

logger = logging.getLogger(__name__)


class FamilyTag(models.TextChoices):
    AP = "ap", "Arithmetic progression"
    GP = "gp", "Geometric progression"
    CONVEX = "convex", "Convex image of [1..n]"
    RANDOM = "rand", "Random subset of 1..R"
    PERTURBED_AP = "pap", "Perturbed arithmetic progression"


@attrs.frozen
class FamilySpec:
    tag: FamilyTag
    params: tuple = ()
    fn: Optional[ConvexFn] = None
    seed: Optional[int] = None

    def __str__(self):
        if self.tag == FamilyTag.CONVEX:
            return f"convex:{self.fn}"
        parts = [self.tag.value, *(format_scalar(p) for p in self.params)]
        if self.seed is not None:
            parts.append(hex(self.seed))
        return ":".join(parts)

    def resolved_seed(self) -> int:
        if self.seed is not None:
            return self.seed
        return int(getattr(settings, "ENERGYLAB_DEFAULT_SEED", 0x5EED))


def _parse_int(text: str, what: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise ParameterError(f"{what} must be an integer, got {text!r}.") from None


def parse_family(text: str, seed: int = None) -> FamilySpec:
    """Parse ``ap:0:1``, ``gp:1:2``, ``convex:square``, ``rand:R[:seed]`` or ``pap:s:d:j[:seed]``."""
    head, _, rest = text.strip().partition(":")
    if head not in FamilyTag.values:
        raise ParameterError(f"unknown family {head!r}; expected one of {', '.join(FamilyTag.values)}.")
    tag = FamilyTag(head)
    parts = rest.split(":") if rest else []
    if tag == FamilyTag.CONVEX:
        if not rest:
            raise ParameterError("convex family needs a function, e.g. convex:square.")
        return FamilySpec(tag, fn=parse_function(rest))
    if tag in (FamilyTag.AP, FamilyTag.GP):
        if len(parts) != 2:
            raise ParameterError(f"{head} family takes two parameters, got {text!r}.")
        start, step = (parse_rational(p) for p in parts)
        if tag == FamilyTag.AP and step == 0:
            raise ParameterError("ap step must be non-zero.")
        if tag == FamilyTag.GP and (start == 0 or step in (0, 1, -1)):
            raise ParameterError("gp needs base != 0 and ratio not in {0, 1, -1}.")
        return FamilySpec(tag, (start, step))
    if tag == FamilyTag.RANDOM:
        if len(parts) not in (1, 2):
            raise ParameterError(f"rand family is rand:R[:seed], got {text!r}.")
        bound = _parse_int(parts[0], "rand range")
        if bound < 1:
            raise ParameterError("rand range must be positive.")
        if len(parts) == 2:
            seed = _parse_int(parts[1], "seed")
        return FamilySpec(tag, (bound,), seed=seed)
    if len(parts) not in (3, 4):
        raise ParameterError(f"pap family is pap:start:step:jitter[:seed], got {text!r}.")
    start, step = parse_rational(parts[0]), parse_rational(parts[1])
    jitter = _parse_int(parts[2], "pap jitter")
    if jitter < 0 or step == 0:
        raise ParameterError("pap needs jitter >= 0 and a non-zero step.")
    if len(parts) == 4:
        seed = _parse_int(parts[3], "seed")
    return FamilySpec(tag, (start, step, jitter), seed=seed)


def generate(spec: FamilySpec, n: int) -> FiniteSet:
    """The size-``n`` member of a family; identical for identical spec, seed and ``n``."""
    if n < 1:
        raise ParameterError(f"set size must be at least 1, got {n}.")
    if spec.tag == FamilyTag.AP:
        start, step = spec.params
        return from_values(start + i * step for i in range(n))
    if spec.tag == FamilyTag.GP:
        base, ratio = spec.params
        return from_values(base * ratio**i for i in range(n))
    if spec.tag == FamilyTag.CONVEX:
        return image(from_values(range(1, n + 1)), spec.fn)
    rng = SplitMix64(spec.resolved_seed())
    if spec.tag == FamilyTag.RANDOM:
        (bound,) = spec.params
        if n > bound:
            raise ParameterError(f"cannot draw {n} distinct values from 1..{bound}.")
        drawn = set()
        while len(drawn) < n:
            drawn.add(rng.below(bound) + 1)
        return from_values(drawn)
    start, step, jitter = spec.params
    # Offsets are drawn among the values still free, so overlapping windows keep n elements.
    drawn = set()
    for i in range(n):
        centre = start + i * step
        free = [offset for offset in range(-jitter, jitter + 1) if centre + offset not in drawn]
        if not free:
            raise ParameterError(f"pap cannot place element {i}: every value within {jitter} of {centre} is taken.")
        drawn.add(centre + free[rng.below(len(free))])
    return from_values(drawn)


def parse_set_descriptor(text: str, seed: int = None) -> tuple[FiniteSet, str]:
    """A family string with a trailing size (``ap:0:1:64``) or a set file path."""
    head = text.split(":", 1)[0]
    if head in FamilyTag.values:
        family, _, size = text.rpartition(":")
        if not family:
            raise ParameterError(f"{text!r} needs a trailing size, e.g. {text}:64.")
        spec = parse_family(family, seed)
        n = _parse_int(size, "set size")
        logger.debug("Generating %s with n=%s", spec, n)
        return generate(spec, n), f"{spec}:{n}"
    path = Path(text)
    return read_set_file(path), str(path)


def verify_convexity(S: FiniteSet) -> bool:
    """True iff consecutive gaps strictly increase."""
    if len(S) < 3:
        raise ParameterError(f"convexity needs at least 3 elements, got {len(S)}.")
    values = list(S) if not S.is_exact else [Fraction(x) for x in S]
    gaps = [b - a for a, b in zip(values, values[1:])]
    return all(g0 < g1 for g0, g1 in zip(gaps, gaps[1:]))
