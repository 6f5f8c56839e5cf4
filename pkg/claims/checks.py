"""The claims ledger: one checker per inequality.

Exact claims (Cauchy-Schwarz, Hoelder) are decided with exact arithmetic and
get a pass/fail verdict. Asymptotic claims hide constants and log factors, so
both sides are computed with constant 1 and only the log-margin is reported;
:mod:`claims.scan` turns a series of margins into a verdict.

Every report also carries ``conditions``: exact steps of the underlying
argument (binding, a failure fails the report) and side conditions stated with
an implicit constant (recorded only).
"""

import logging
import math
from fractions import Fraction
from typing import Callable, Optional

import attrs
from django.db import models

from convexfn.registry import ConvexFn
from energy.services import check_sandwich, dominant_class, dyadic_decompose, energy, mixed_sum
from generators.families import verify_convexity
from incidence.services import count_solutions_qr, line_energy_experiment, ratio_quadruple_count
from numeric.bounds import decide, power_interval
from numeric.exceptions import BackendMismatch, ParameterError, SideConditionViolation
from numeric.scalars import Backend, format_scalar
from regularize.certificate import verify_certificate
from regularize.decomp import decomp
from setcore.ops import SetOp, combine, rep_function
from setcore.sets import FiniteSet, affine, from_values, image, promote, reciprocal

from .popular import equiv_classes, popular_set, refined_set, refined_size_holds, solution_keys

logger = logging.getLogger(__name__)


class ClaimId(models.TextChoices):
    LEM_COUNT = "lem_count", "Solutions of c = a - b under multiplicative data"
    LEM_E3 = "lem_e3", "Third energy under multiplicative data"
    LEM_E3_CONVEX = "lem_e3_convex", "Third energy of a convex image under additive data"
    COR_E3_PRODUCT = "cor_e3_product", "Energy product after decomposition"
    PROP_ENERGY_GENERAL = "prop_energy_general", "General auxiliary energy estimate"
    THM_MAIN_38 = "thm_main_38", "|A+B|^38 |f(A)+g(B)|^38 >= (|A||B|)^49"
    THM_MAIN_DIFF = "thm_main_diff", "Mixed sum and difference estimate"
    COR_CONVEX_49_38 = "cor_convex_49_38", "|A + f(A)| >= |A|^(49/38)"
    COR_CONVEX_DIFF = "cor_convex_diff", "|A - A|^5 |f(A) - f(A)|^5 >= |A|^13"
    COR_SUMPROD_ASYM = "cor_sumprod_asym", "|AB|^38 |A+B|^38 >= (|A||B|)^49"
    COR_A_APLUS1 = "cor_A_Aplus1", "|A(A+1)| >= |A|^(49/38)"
    THM_INCIDENCE = "thm_incidence", "Incidences with lines y = ax + a'"
    THM_ABPLUSA = "thm_ABplusA", "|AB + A| >= |A|^(3/2 + 3/170)"
    CS_SANDWICH = "cs_sandwich", "Cauchy-Schwarz energy sandwich"
    HOLDER_MIXED = "holder_mixed", "Hoelder bound for the mixed sum"
    E32_CONVEX = "e32_convex", "E_(3/2)(A, B) <= |A+B|^(3/2) for convex A"
    RATIO_COUNT = "ratio_count", "Ratio quadruples at most |A|^6 log|A|"


class PassMode(models.TextChoices):
    EXACT = "exact", "Exact"
    TREND = "constant-free-trend", "Constant-free trend"


@attrs.frozen
class Condition:
    name: str
    lhs: str
    rhs: str
    holds: Optional[bool]
    binding: bool = True


@attrs.frozen
class ClaimInputs:
    A: FiniteSet
    B: Optional[FiniteSet] = None
    C: Optional[FiniteSet] = None
    Q: Optional[FiniteSet] = None
    R: Optional[FiniteSet] = None
    U: Optional[FiniteSet] = None
    V: Optional[FiniteSet] = None
    f: Optional[ConvexFn] = None
    g: Optional[ConvexFn] = None
    T: Optional[int] = None
    k: Optional[Fraction] = None
    c1: Optional[Fraction] = None
    lam: Optional[Fraction] = None
    sign: str = "+"
    op: SetOp = SetOp.DIFF
    family: str = ""
    labels: dict = attrs.field(factory=dict, eq=False)

    def describe(self) -> dict:
        described = {}
        for name in ("A", "B", "C", "Q", "R", "U", "V"):
            S = getattr(self, name)
            if S is not None:
                described[name] = self.labels.get(name, f"{len(S)} elements")
        for name in ("f", "g"):
            if getattr(self, name) is not None:
                described[name] = str(getattr(self, name))
        for name in ("T", "k", "c1", "lam"):
            if getattr(self, name) is not None:
                described[name] = format_scalar(getattr(self, name))
        if self.sign != "+":
            described["sign"] = self.sign
        if self.op != SetOp.DIFF:
            described["op"] = SetOp(self.op).value
        return described


def _log(x) -> Optional[float]:
    if x is None or x <= 0:
        return None
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


@attrs.frozen
class ClaimReport:
    claim: ClaimId
    family: str
    n: Optional[int]
    inputs: dict = attrs.field(factory=dict, eq=False)
    lhs: object = None
    rhs: object = None
    direction: str = "le"
    pass_mode: PassMode = PassMode.TREND
    holds: Optional[bool] = None
    conditions: tuple = ()
    log_sizes: dict = attrs.field(factory=dict, eq=False)
    error: str = ""

    @property
    def margin(self) -> Optional[float]:
        """``log(rhs/lhs)`` for ``le`` claims and ``log(lhs/rhs)`` for ``ge``; >= 0 means it holds with constant 1."""
        left, right = _log(self.lhs), _log(self.rhs)
        if left is None or right is None:
            return None
        return right - left if self.direction == "le" else left - right

    @property
    def ratio(self) -> Optional[float]:
        left, right = _log(self.lhs), _log(self.rhs)
        if left is None or right is None:
            return None
        try:
            return math.exp(left - right)
        except OverflowError:
            return math.inf

    @property
    def failed_conditions(self) -> list:
        return [c for c in self.conditions if c.binding and c.holds is False]

    @property
    def verdict(self) -> str:
        if self.error or self.failed_conditions:
            return "fail"
        if self.pass_mode == PassMode.EXACT:
            return "pass" if self.holds else "fail"
        return "recorded"

    @classmethod
    def failed(cls, claim, family: str, n: Optional[int], message: str) -> "ClaimReport":
        return cls(ClaimId(claim), family, n, error=message)


CHECKS: dict = {}


def register(claim: ClaimId) -> Callable:
    def decorator(fn):
        CHECKS[claim] = fn
        return fn

    return decorator


def check(claim, inputs: ClaimInputs) -> ClaimReport:
    claim = ClaimId(claim)
    logger.info("Checking %s on |A|=%s", claim.value, len(inputs.A))
    report = CHECKS[claim](inputs)
    logger.debug("%s: lhs=%s rhs=%s verdict=%s", claim.value, report.lhs, report.rhs, report.verdict)
    return report


def _report(claim, inp: ClaimInputs, lhs, rhs, direction, mode, conditions, sets: dict) -> ClaimReport:
    if mode == PassMode.EXACT:
        holds = decide(lhs, rhs, direction).holds
    else:
        holds = None
    report = ClaimReport(
        claim,
        inp.family or inp.labels.get("A", ""),
        len(inp.A),
        inp.describe(),
        lhs,
        rhs,
        direction,
        mode,
        holds,
        tuple(conditions),
        {name: round(math.log2(len(S)), 6) for name, S in sets.items() if S is not None and len(S)},
    )
    if mode == PassMode.TREND and report.margin is not None:
        report = attrs.evolve(report, holds=report.margin >= 0)
    return report


def _exact(name: str, lhs, rhs, relation: str = "le", binding: bool = True) -> Condition:
    decision = decide(lhs, rhs, relation)
    return Condition(name, str(decision.lhs), str(decision.rhs), decision.holds, binding)


def _recorded(name: str, lhs, rhs, relation: str = "le") -> Condition:
    """A side condition stated up to a constant, checked with constant 1."""
    holds = lhs <= rhs if relation == "le" else lhs >= rhs
    return Condition(name, _text(lhs), _text(rhs), holds, binding=False)


def _info(name: str, lhs, rhs="") -> Condition:
    return Condition(name, _text(lhs), _text(rhs), None, binding=False)


def _text(x) -> str:
    if isinstance(x, (int, float, Fraction)):
        return format_scalar(x)
    return str(x)


def _given(*options):
    """The first option that is not None."""
    return next(option for option in options if option is not None)


def _align(*sets: FiniteSet) -> list:
    if any(S.backend == Backend.TOLERANT for S in sets):
        return [promote(S, Backend.TOLERANT) for S in sets]
    return list(sets)


def _combine(X: FiniteSet, op: SetOp, Y: FiniteSet) -> FiniteSet:
    X, Y = _align(X, Y)
    return combine(X, op, Y)


def _energy(X: FiniteSet, Y: FiniteSet, k, op: SetOp = SetOp.DIFF):
    X, Y = _align(X, Y)
    return energy(X, Y, k, op).value


def _require_exact(*sets: FiniteSet) -> None:
    if not all(S.is_exact for S in sets if S is not None):
        raise BackendMismatch("this claim is checked on exact sets only.")


def _require_fn(inp: ClaimInputs) -> ConvexFn:
    if inp.f is None:
        raise ParameterError("this claim needs a convex or concave function f.")
    return inp.f


def _log_factor(n: int) -> float:
    return max(1.0, math.log2(n))


def _power(base: int, exponent: Fraction) -> float:
    return float(base) ** float(exponent)


def _data(A: FiniteSet, Q: FiniteSet, R: FiniteSet, T: Optional[int], op: SetOp, label: str) -> int:
    """Check ``r_{Q op R}(a) >= T`` on ``A``; ``T`` defaults to the minimum."""
    rep = rep_function(Q, op, R)
    worst = min(rep[a] for a in A)
    if T is None:
        T = worst
    if T < 1 or worst < T:
        raise SideConditionViolation(f"r_{{{label}}}(a) >= T fails: the minimum over A is {worst}, T = {T}.")
    return T


def _multiplicative_data(inp: ClaimInputs, A: FiniteSet):
    """Data in ratio form ``r_{Q/R}(a) >= T``; defaults ``Q = AA``, ``R = A``, ``T = |A|`` (``a = (ab) / b``)."""
    if inp.Q is None and inp.R is None:
        Q, R = combine(A, SetOp.PROD, A), A
        T = inp.T if inp.T is not None else len(A)
    else:
        Q, R, T = _given(inp.Q, A), _given(inp.R, A), inp.T
    _require_exact(Q, R)
    return Q, R, _data(A, Q, R, T, SetOp.RATIO, "Q/R")


def _dyadic_chain(rep, total: int) -> tuple:
    classes = dyadic_decompose(rep, 3)
    chosen = dominant_class(rep, 3, classes)
    return [
        _exact("E_3 < sum_i 8 |D_i| t_i^3", total, sum(8 * c.size * c.t**3 for c in classes), "lt"),
        _exact("t |D_t| <= #{(a, b, d) : d = a - b, d in D_t}", chosen.t * chosen.size, sum(rep[x] for x in chosen.members)),
    ], chosen


@register(ClaimId.LEM_COUNT)
def _lem_count(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    B = _given(inp.B, A)
    _require_exact(A, B)
    C = inp.C if inp.C is not None else combine(A, SetOp.DIFF, B)
    Q, R, T = _multiplicative_data(inp, A)
    rep = rep_function(A, SetOp.DIFF, B)
    count = sum(rep[c] for c in C)
    solutions = count_solutions_qr(Q, reciprocal(R), B, C)
    rhs = (len(Q) * len(R) * len(B) * len(C)) ** (2 / 3) / T
    conditions = [
        _exact("T #{c = a - b} <= #{c = q/r - b}", T * count, solutions),
        _recorded("|R||C| <= (|Q||B|)^2", len(R) * len(C), (len(Q) * len(B)) ** 2),
        _recorded("|Q||C| <= (|R||B|)^2", len(Q) * len(C), (len(R) * len(B)) ** 2),
    ]
    return _report(ClaimId.LEM_COUNT, inp, count, rhs, "le", PassMode.TREND, conditions, {"A": A, "B": B, "C": C, "Q": Q, "R": R})


@register(ClaimId.LEM_E3)
def _lem_e3(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    B = _given(inp.B, A)
    _require_exact(A, B)
    Q, R, T = _multiplicative_data(inp, A)
    if len(R) * len(A) > len(Q) ** 2 * len(B):
        raise SideConditionViolation(f"|R||A| <= |Q|^2|B| fails: {len(R) * len(A)} > {len(Q) ** 2 * len(B)}.")
    rep = rep_function(A, SetOp.DIFF, B)
    total = energy(A, B, 3).value
    rhs = (len(Q) * len(R) * len(B)) ** 2 / T**3 * _log_factor(len(A))
    chain, chosen = _dyadic_chain(rep, total)
    conditions = chain + [
        _recorded("|Q||A| <= |R|^2 |B|", len(Q) * len(A), len(R) ** 2 * len(B)),
        _recorded("|Q||D_t| <= (|R||B|)^2", len(Q) * chosen.size, (len(R) * len(B)) ** 2),
    ]
    return _report(ClaimId.LEM_E3, inp, total, rhs, "le", PassMode.TREND, conditions, {"A": A, "B": B, "Q": Q, "R": R})


@register(ClaimId.LEM_E3_CONVEX)
def _lem_e3_convex(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    f = _require_fn(inp)
    fA = image(A, f)
    B = _given(inp.B, fA)
    if inp.Q is None and inp.R is None:
        Q, R = combine(A, SetOp.SUM, A), A
        T = inp.T if inp.T is not None else len(A)
    else:
        Q, R, T = _given(inp.Q, A), _given(inp.R, A), inp.T
    _require_exact(A, Q, R)
    T = _data(A, Q, R, T, SetOp.DIFF, "Q-R")
    if len(Q) < len(R):
        raise SideConditionViolation(f"|Q| >= |R| fails: {len(Q)} < {len(R)}.")
    X, Y = _align(fA, B)
    rep = rep_function(X, SetOp.DIFF, Y)
    total = energy(X, Y, 3).value
    rhs = (len(Q) * len(R) * len(B)) ** 2 / T**3 * _log_factor(len(A))
    chain, _ = _dyadic_chain(rep, total)
    conditions = chain + [_recorded("|R||A| <= |Q|^2 |B|", len(R) * len(A), len(Q) ** 2 * len(B))]
    return _report(ClaimId.LEM_E3_CONVEX, inp, total, rhs, "le", PassMode.TREND, conditions, {"A": A, "B": B, "Q": Q, "R": R})


@register(ClaimId.COR_E3_PRODUCT)
def _cor_e3_product(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    f = _require_fn(inp)
    V = _given(inp.V, A)
    c1 = inp.c1 if inp.c1 is not None else Fraction(1, 2)
    cert = decomp(A, V, SetOp.DIFF, 3, c1)
    fC = image(cert.C, f)
    U = inp.U if inp.U is not None else image(A, f)
    lhs = energy(cert.B, V, 3).value * _energy(fC, U, 3)
    rhs = len(U) ** 2 * len(V) ** 2 * len(A) ** 3
    report = verify_certificate(cert)
    conditions = [
        _exact("decomposition certificate checks failing", len(report.failures), 0),
        _recorded("|U||V| >= |A|", len(U) * len(V), len(A), "ge"),
        _info("|B|, |C|", f"{len(cert.B)}, {len(cert.C)}"),
    ]
    return _report(ClaimId.COR_E3_PRODUCT, inp, lhs, rhs, "le", PassMode.TREND, conditions, {"A": A, "U": U, "V": V})


@register(ClaimId.PROP_ENERGY_GENERAL)
def _prop_energy_general(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    C = _given(inp.C, inp.B, A)
    _require_exact(A, C)
    k = inp.k if inp.k is not None else Fraction(2)
    P = popular_set(A, C)
    refined = refined_set(A, C, P)
    if not refined:
        raise SideConditionViolation(f"no element of A has half of its sums with C popular (|A| = {len(A)}).")
    rep = rep_function(refined, SetOp.DIFF, refined)
    chosen = dominant_class(rep, k)
    D, delta = chosen.members, chosen.t
    table = equiv_classes(refined, C, D, P)
    N = table.total
    mixed = mixed_sum(rep, rep_function(C, SetOp.DIFF, C))
    S = combine(A, SetOp.SUM, C)
    size = refined_size_holds(A, refined)
    conditions = [Condition("|A'| >= (1 - 2/L(|A|)) |A|", str(size.lhs), str(size.rhs), size.holds)]
    conditions.append(Condition("class keys (a - b, a + c) determine the class", str(len(table)), "", table.keys_are_shifts()))
    conditions.append(_exact("|C| |D| Delta <= 2 N", len(C) * len(D) * delta, 2 * N))
    conditions.append(_exact("N^2 <= |classes| * sum |class|^2", N * N, len(table) * table.second_moment))
    conditions.append(_exact("sum |class|^2 <= sum_t r_{A'-A'}(t)^2 r_{C-C}(t)", table.second_moment, mixed))
    conditions.append(_exact("|classes| <= |{(d, s1, s2) : d = s1 - s2}|", len(table), solution_keys(D, P, S)))
    conditions.append(
        _exact(
            "(sum_t r_{A'-A'}^2 r_{C-C})^3 <= E_3(A')^2 E_3(C)",
            mixed**3,
            energy(refined, refined, 3).value ** 2 * energy(C, C, 3).value,
        )
    )
    lhs = len(D) ** 9 * delta**12
    rhs = Fraction(
        len(S) ** 6
        * energy(A, A, 3).value ** 4
        * energy(C, C, 3).value ** 2
        * energy(A, D, 3).value
        * energy(C, S, 3).value ** 2,
        len(C) ** 18 * len(A) ** 3,
    )
    return _report(ClaimId.PROP_ENERGY_GENERAL, inp, lhs, rhs, "le", PassMode.TREND, conditions, {"A": A, "C": C, "D": D})


def _pair(inp: ClaimInputs):
    A = inp.A
    B = _given(inp.B, A)
    f = _require_fn(inp)
    g = inp.g or f
    return A, B, image(A, f), image(B, g)


@register(ClaimId.THM_MAIN_38)
def _thm_main_38(inp: ClaimInputs) -> ClaimReport:
    A, B, fA, gB = _pair(inp)
    sums = _combine(A, SetOp.SUM, B)
    images = _combine(fA, SetOp.SUM, gB)
    lhs = (len(A) * len(B)) ** 49
    rhs = len(sums) ** 38 * len(images) ** 38
    conditions = [_info("|A+B|, |f(A)+g(B)|", f"{len(sums)}, {len(images)}")]
    return _report(ClaimId.THM_MAIN_38, inp, lhs, rhs, "le", PassMode.TREND, conditions, {"A": A, "B": B})


@register(ClaimId.THM_MAIN_DIFF)
def _thm_main_diff(inp: ClaimInputs) -> ClaimReport:
    if inp.sign not in ("+", "-"):
        raise ParameterError(f"sign must be + or -, got {inp.sign!r}.")
    op = SetOp.SUM if inp.sign == "+" else SetOp.DIFF
    A, B, fA, gB = _pair(inp)
    lhs = (len(A) * len(B)) ** 39
    rhs = (
        len(_combine(A, op, B)) ** 20
        * len(_combine(fA, op, gB)) ** 20
        * len(combine(A, SetOp.DIFF, A)) ** 5
        * len(combine(B, SetOp.DIFF, B)) ** 5
        * len(combine(fA, SetOp.DIFF, fA)) ** 5
        * len(combine(gB, SetOp.DIFF, gB)) ** 5
    )
    k = Fraction(12, 7)
    conditions, product = [], 1
    for index, (name, X) in enumerate((("A", A), ("B", B), ("f(A)", fA), ("g(B)", gB)), start=1):
        rep = rep_function(X, SetOp.DIFF, X)
        chosen = dominant_class(rep, k)
        sandwich = check_sandwich(rep, k, chosen)
        conditions.append(Condition(f"E_(12/7)({name}) sandwich on D_{index}", str(sandwich.lower.lhs), str(sandwich.upper.rhs), sandwich.holds))
        conditions.append(_info(f"D_{index} of {name} - {name}: t, |D|", f"{chosen.t}, {chosen.size}"))
        product *= chosen.size**7 * chosen.t**12
    bound = len(_combine(A, SetOp.SUM, B)) ** 20 * len(_combine(fA, SetOp.SUM, gB)) ** 20 * len(A) ** 9 * len(B) ** 9
    conditions.append(_recorded("prod |D_i|^7 t_i^12 <= |A+B|^20 |f(A)+g(B)|^20 |A|^9 |B|^9", product, bound))
    return _report(ClaimId.THM_MAIN_DIFF, inp, lhs, rhs, "le", PassMode.TREND, conditions, {"A": A, "B": B})


def _at_least_power(name: str, value: int, base: int, exponent: Fraction) -> Condition:
    decision = decide(value, lambda m: power_interval(base, exponent, m), "ge")
    return Condition(name, str(decision.lhs), str(decision.rhs), decision.holds, binding=False)


@register(ClaimId.COR_CONVEX_49_38)
def _cor_convex_49_38(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    fA = image(A, _require_fn(inp))
    exponent = Fraction(49, 38)
    lhs = len(_combine(A, SetOp.SUM, fA))
    both = len(combine(A, SetOp.SUM, A)) + len(combine(fA, SetOp.SUM, fA))
    conditions = [_at_least_power("|A+A| + |f(A)+f(A)| >= |A|^(49/38)", both, len(A), exponent)]
    return _report(ClaimId.COR_CONVEX_49_38, inp, lhs, _power(len(A), exponent), "ge", PassMode.TREND, conditions, {"A": A})


@register(ClaimId.COR_CONVEX_DIFF)
def _cor_convex_diff(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    fA = image(A, _require_fn(inp))
    lhs = len(combine(A, SetOp.DIFF, A)) ** 5 * len(combine(fA, SetOp.DIFF, fA)) ** 5
    return _report(ClaimId.COR_CONVEX_DIFF, inp, lhs, len(A) ** 13, "ge", PassMode.TREND, [], {"A": A})


@register(ClaimId.COR_SUMPROD_ASYM)
def _cor_sumprod_asym(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    B = _given(inp.B, A)
    lhs = len(_combine(A, SetOp.PROD, B)) ** 38 * len(_combine(A, SetOp.SUM, B)) ** 38
    return _report(ClaimId.COR_SUMPROD_ASYM, inp, lhs, (len(A) * len(B)) ** 49, "ge", PassMode.TREND, [], {"A": A, "B": B})


def _products(X: FiniteSet, Y: FiniteSet, shift=0) -> FiniteSet:
    X, Y = _align(X, Y)
    return from_values(((x + shift) * (y + shift) for x in X for y in Y), X.backend)


@register(ClaimId.COR_A_APLUS1)
def _cor_A_Aplus1(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    B = _given(inp.B, A)
    lhs = len(from_values((a * (b + 1) for a in A for b in A), A.backend))
    both = len(_products(A, B)) + len(_products(A, B, shift=1))
    conditions = [_at_least_power("|AB| + |(A+1)(B+1)| >= (|A||B|)^(49/76)", both, len(A) * len(B), Fraction(49, 76))]
    return _report(ClaimId.COR_A_APLUS1, inp, lhs, _power(len(A), Fraction(49, 38)), "ge", PassMode.TREND, conditions, {"A": A, "B": B})


@register(ClaimId.THM_INCIDENCE)
def _thm_incidence(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    B = _given(inp.B, A)
    experiment = line_energy_experiment(A, B)
    conditions = [
        _exact("|A|^2 |B| <= I(B x (AB + A), L)", experiment.lower_bound, experiment.incidences),
        _info("E_4(A) multiplicative, |AB + A|", f"{experiment.e4_ratio}, {experiment.size_c}"),
    ]
    return _report(ClaimId.THM_INCIDENCE, inp, experiment.incidences, experiment.rhs, "le", PassMode.TREND, conditions, {"A": A, "B": B})


@register(ClaimId.THM_ABPLUSA)
def _thm_ABplusA(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    B = _given(inp.B, A)
    _require_exact(A, B)
    U = _given(inp.U, A)
    lam = inp.lam if inp.lam is not None else Fraction(1)
    c1 = inp.c1 if inp.c1 is not None else Fraction(1, 2)
    n = len(A)
    lhs = len(from_values(a * b + a2 for a in A for b in B for a2 in A))
    e4 = energy(A, A, 4, SetOp.RATIO).value
    e3 = energy(A, A, 3, SetOp.RATIO).value
    cert = decomp(A, A, SetOp.RATIO, 3, c1)
    A1, A2 = cert.B, cert.C
    e3_A1 = energy(A1, A, 3, SetOp.RATIO).value
    dilated = len(combine(A, SetOp.SUM, affine(A, lam)))
    chosen = dominant_class(rep_function(A2, SetOp.DIFF, A2), 2)
    conditions = [
        _exact("E_4x(A) <= |A| E_3x(A)", e4, n * e3),
        _recorded("|A|^(7/3) <= |AB + A| E_4x(A)^(1/6)", _power(n, Fraction(7, 3)), lhs * e4 ** (1 / 6)),
        _exact("multiplicative decomposition checks failing", len(verify_certificate(cert).failures), 0),
        _recorded("E_3x(A1, A) E_3(A2, U) <= |A|^5 |U|^2", e3_A1 * energy(A2, U, 3).value, n**5 * len(U) ** 2),
        _recorded(
            "|D|^7 t^12 <= |A + lam A|^10 |A|^36 / E_3x(A1, A)^9",
            chosen.size**7 * chosen.t**12,
            Fraction(dilated**10 * n**36, e3_A1**9),
        ),
        _recorded("|A + lam A|^19 >= E_3x(A1, A)^11 / |A|^14", dilated**19, Fraction(e3_A1**11, n**14), "ge"),
        _info("log E_3x(A1, A) / log |A| vs 331/85", math.log(e3_A1) / math.log(n), "331/85"),
        _info("|A| / |B|", Fraction(n, len(B))),
    ]
    return _report(ClaimId.THM_ABPLUSA, inp, lhs, _power(n, Fraction(129, 85)), "ge", PassMode.TREND, conditions, {"A": A, "B": B})


@register(ClaimId.CS_SANDWICH)
def _cs_sandwich(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    B = _given(inp.B, A)
    _require_exact(A, B)
    op = SetOp(inp.op)
    if op not in (SetOp.DIFF, SetOp.RATIO):
        raise ParameterError(f"cs_sandwich runs on diff or ratio energies, got {op.value}.")
    pair_op = SetOp.SUM if op == SetOp.DIFF else SetOp.PROD
    mixed = energy(A, B, 2, op).value
    outer = len(combine(A, pair_op, B))
    conditions = [_exact("|A|^2 |B|^2 <= E_2(A, B) |A o B|", (len(A) * len(B)) ** 2, mixed * outer)]
    lhs, rhs = mixed**2, energy(A, A, 2, op).value * energy(B, B, 2, op).value
    return _report(ClaimId.CS_SANDWICH, inp, lhs, rhs, "le", PassMode.EXACT, conditions, {"A": A, "B": B})


@register(ClaimId.HOLDER_MIXED)
def _holder_mixed(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    C = _given(inp.C, inp.B, A)
    _require_exact(A, C)
    mixed = mixed_sum(rep_function(A, SetOp.DIFF, A), rep_function(C, SetOp.DIFF, C))
    rhs = energy(A, A, 3).value ** 2 * energy(C, C, 3).value
    conditions = [_info("sum_t r_{A-A}(t)^2 r_{C-C}(t)", mixed)]
    return _report(ClaimId.HOLDER_MIXED, inp, mixed**3, rhs, "le", PassMode.EXACT, conditions, {"A": A, "C": C})


@register(ClaimId.E32_CONVEX)
def _e32_convex(inp: ClaimInputs) -> ClaimReport:
    X = image(inp.A, inp.f) if inp.f is not None else inp.A
    if len(X) < 3 or not verify_convexity(X):
        raise SideConditionViolation("e32_convex needs a convex set of at least 3 elements.")
    Y = _given(inp.B, X)
    X, Y = _align(X, Y)
    lhs = float(energy(X, Y, Fraction(3, 2)).value)
    rhs = len(combine(X, SetOp.SUM, Y)) ** 1.5
    return _report(ClaimId.E32_CONVEX, inp, lhs, rhs, "le", PassMode.TREND, [], {"A": X, "B": Y})


@register(ClaimId.RATIO_COUNT)
def _ratio_count(inp: ClaimInputs) -> ClaimReport:
    A = inp.A
    count = ratio_quadruple_count(A)
    rhs = len(A) ** 6 * _log_factor(len(A))
    return _report(ClaimId.RATIO_COUNT, inp, count, rhs, "le", PassMode.TREND, [], {"A": A})
