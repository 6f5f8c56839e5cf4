"""Certificate text format and independent re-verification.

The text form holds one ``key: value`` pair per line. Sets are written as
space-separated scalars, rationals as ``p/q`` and every trace step as
``step: size t class_size points kept stop``.
"""

import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

import attrs

from energy.services import dyadic_decompose, energy_interval
from numeric.bounds import Decision, L_interval, decide, ln2_interval, power_interval
from numeric.exceptions import EnergyLabError, ParameterError
from numeric.scalars import format_scalar, parse_rational, parse_scalar
from setcore.ops import rep_function
from setcore.sets import FiniteSet, from_values

from .decomp import DecompositionCertificate, TraceStep, decomp, epsilon_denominator, slope_counts

logger = logging.getLogger(__name__)

HEADER = "# energylab decomposition certificate"

SET_KEYS = ("A", "V", "B", "C", "D_t")


def _format_set(S: FiniteSet) -> str:
    return " ".join(format_scalar(x) for x in S)


def format_certificate(cert: DecompositionCertificate) -> str:
    lines = [
        HEADER,
        f"op: {cert.op.value}",
        f"k: {format_scalar(cert.k)}",
        f"c1: {format_scalar(cert.c1)}",
        f"epsilon: {format_scalar(cert.epsilon)}",
        f"t: {cert.t}",
        f"iterations: {cert.iterations}",
    ]
    lines.extend(f"{key}: {_format_set(getattr(cert, key))}" for key in SET_KEYS)
    for step in cert.trace:
        lines.append(f"step: {step.size} {step.t} {step.class_size} {step.points} {step.kept} {int(step.stop)}")
    return "\n".join(lines) + "\n"


def _parse_set(value: str) -> FiniteSet:
    return from_values(parse_scalar(token) for token in value.split())


def _parse_step(value: str) -> TraceStep:
    fields = value.split()
    if len(fields) != 6:
        raise ParameterError(f"a trace step has six fields, got {len(fields)}.")
    size, t, class_size, points, kept, stop = (int(f) for f in fields)
    return TraceStep(size, t, class_size, points, kept, bool(stop))


def parse_certificate(text: str, source: str = "<text>") -> DecompositionCertificate:
    fields, trace = {}, []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition(":")
        key, value = key.strip(), value.strip()
        try:
            if not sep:
                raise ParameterError(f"expected 'key: value', got {line!r}.")
            if key == "step":
                trace.append(_parse_step(value))
            elif key in fields:
                raise ParameterError(f"duplicate key {key!r}.")
            elif key in SET_KEYS:
                fields[key] = _parse_set(value)
            elif key in ("k", "c1", "epsilon"):
                fields[key] = parse_rational(value)
            elif key in ("t", "iterations"):
                fields[key] = int(value)
            elif key == "op":
                fields[key] = value
            else:
                raise ParameterError(f"unknown key {key!r}.")
        except (EnergyLabError, ValueError) as exc:
            raise ParameterError(f"{source}:{lineno}: {exc}") from exc

    missing = [key for key in ("op", "k", "c1", "epsilon", "t", "iterations", *SET_KEYS) if key not in fields]
    if missing:
        raise ParameterError(f"{source}: missing keys {', '.join(missing)}.")
    if not trace:
        raise ParameterError(f"{source}: the certificate has no trace steps.")
    if fields["iterations"] != len(trace) - 1:
        raise ParameterError(f"{source}: iterations {fields['iterations']} disagrees with {len(trace)} trace steps.")
    try:
        return DecompositionCertificate(
            fields["A"], fields["V"], fields["op"], fields["k"], fields["c1"], fields["epsilon"],
            fields["B"], fields["C"], fields["t"], fields["D_t"], tuple(trace),
        )
    except ValueError as exc:
        raise ParameterError(f"{source}: {exc}") from exc


def dump_certificate(cert: DecompositionCertificate, path) -> Path:
    path = Path(path)
    path.write_text(format_certificate(cert), encoding="utf-8")
    return path


def load_certificate(path) -> DecompositionCertificate:
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"certificate file {path} does not exist.")
    return parse_certificate(path.read_text(encoding="utf-8"), str(path))


@attrs.frozen
class CertificateCheck:
    name: str
    holds: Optional[bool]
    lhs: str = ""
    rhs: str = ""
    relation: str = ""
    detail: str = ""
    binding: bool = True

    @classmethod
    def from_decision(cls, name: str, decision: Decision, binding: bool = True) -> "CertificateCheck":
        return cls(name, decision.holds, str(decision.lhs), str(decision.rhs), decision.relation, binding=binding)

    @classmethod
    def exact(cls, name: str, lhs, rhs, relation: str, binding: bool = True) -> "CertificateCheck":
        return cls.from_decision(name, decide(lhs, rhs, relation), binding)


@attrs.frozen
class VerificationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def failures(self) -> list:
        return [check for check in self.checks if check.binding and check.holds is not True]

    @property
    def notes(self) -> list:
        """Recorded checks that do not hold; they never fail the certificate."""
        return [check for check in self.checks if not check.binding and check.holds is not True]


def _guarded(name: str, compute: Callable[[], list]) -> list:
    try:
        return compute()
    except (EnergyLabError, ZeroDivisionError) as exc:
        return [CertificateCheck(name, False, detail=str(exc))]


def _class_checks(cert: DecompositionCertificate) -> list:
    """The sandwich, ``D_t`` and slope-count inequalities on a fresh histogram of ``B o V``."""
    k, B, D, t = cert.k, cert.B, cert.D_t, cert.t
    rep = rep_function(B, cert.op, cert.V)
    expected = [x for x, r in rep.items() if t <= r < 2 * t]
    mismatch = len(set(expected) ^ set(D))
    checks = [
        CertificateCheck.exact("D_t is the class [t, 2t) of B o V", mismatch, 0, "le"),
        CertificateCheck(
            "t is a power of two in [1, |B|]",
            t >= 1 and t & (t - 1) == 0 and t <= len(B),
            str(t), str(len(B)), "le",
        ),
    ]
    classes = len(dyadic_decompose(rep, k))

    def peak(m):
        return power_interval(t, k, m) * len(D)

    def total(m):
        return energy_interval(rep, k, m)

    checks.append(CertificateCheck.exact("|D_t| t^k <= E_k(B, V)", peak, total, "le"))
    checks.append(
        CertificateCheck.exact(
            "E_k(B, V) <= 2^k |D_t| t^k * classes", total, lambda m: power_interval(2, k, m) * peak(m) * classes, "le"
        )
    )
    checks.append(
        CertificateCheck.exact(
            "E_k(B, V) <= 2^k |D_t| t^k L(|B|)",
            total,
            lambda m: power_interval(2, k, m) * peak(m) * L_interval(len(B), m),
            "le",
        )
    )

    counts = slope_counts(cert.C, cert.V, cert.op, D)
    if counts:
        low, high = min(counts.values()), max(counts.values())
        checks.append(
            CertificateCheck.exact(
                "r(c) >= |D_t| t / (2^(k+1) |B|) on C",
                low,
                lambda m: Fraction(len(D) * t, len(B)) / power_interval(2, k + 1, m),
                "ge",
            )
        )
        checks.append(
            CertificateCheck.exact(
                "r(c) <= (2 |D_t| t / |B|) k 2^k L(|A|)^2 / c1 on C",
                high,
                lambda m: Fraction(2 * len(D) * t, len(B)) * k / cert.c1
                * power_interval(2, k, m) * L_interval(len(cert.A), m) * L_interval(len(cert.A), m),
                "le",
            )
        )
    return checks


def _size_checks(cert: DecompositionCertificate) -> list:
    k, c1, eps = cert.k, cert.c1, cert.epsilon
    size_a, size_b, size_c = len(cert.A), len(cert.B), len(cert.C)
    return [
        CertificateCheck.exact("|C| >= eps |B| / 2^(k+1)", size_c, lambda m: eps * size_b / power_interval(2, k + 1, m), "ge"),
        CertificateCheck.exact(
            "|C| >= c1 (1 - c1) |A| / (2^(2k+1) ln2 (k - 1) L(|A|)^2)",
            size_c,
            lambda m: c1 * (1 - c1) * size_a
            / (power_interval(2, 2 * k + 1, m) * ln2_interval(m) * (k - 1) * L_interval(size_a, m) * L_interval(size_a, m)),
            "ge",
            binding=False,
        ),
        CertificateCheck.exact("N <= ceil(c1 / eps)", cert.iterations, math.ceil(c1 / eps), "le"),
        CertificateCheck.exact("eps <= c1 / epsilon formula", eps, lambda m: c1 / epsilon_denominator(size_a, k, c1, m), "le"),
    ]


def _replay(cert: DecompositionCertificate) -> CertificateCheck:
    fresh = decomp(cert.A, cert.V, cert.op, cert.k, cert.c1, epsilon=cert.epsilon)
    differing = [
        name
        for name in ("epsilon", "B", "C", "t", "D_t", "trace")
        if getattr(fresh, name) != getattr(cert, name)
    ]
    return CertificateCheck(
        "replay reproduces the certificate",
        not differing,
        "match" if not differing else "differs",
        detail=", ".join(differing),
    )


def verify_certificate(cert: DecompositionCertificate) -> VerificationReport:
    """Recompute every guarantee of ``cert`` from the raw sets.

    Failures are report entries; nothing is raised for a bad certificate.
    """
    A, B, C = cert.A, cert.B, cert.C
    checks = [
        CertificateCheck.exact("C subset of B", sum(1 for x in C if x not in B), 0, "le"),
        CertificateCheck.exact("B subset of A", sum(1 for x in B if x not in A), 0, "le"),
        CertificateCheck.exact("|B| >= (1 - c1) |A|", len(B), (1 - cert.c1) * len(A), "ge"),
    ]
    checks.extend(_guarded("class structure of B o V", lambda: _class_checks(cert)))
    checks.extend(_guarded("size bounds", lambda: _size_checks(cert)))
    checks.extend(_guarded("replay reproduces the certificate", lambda: [_replay(cert)]))
    report = VerificationReport(tuple(checks))
    for check in report.failures:
        logger.warning("Certificate check failed: %s (%s %s %s) %s", check.name, check.lhs, check.relation, check.rhs, check.detail)
    for check in report.notes:
        logger.info("Recorded check does not hold: %s (%s %s %s)", check.name, check.lhs, check.relation, check.rhs)
    return report
