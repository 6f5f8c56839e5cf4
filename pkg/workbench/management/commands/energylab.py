import json
import logging
import re
from contextlib import nullcontext
from fractions import Fraction
from pathlib import Path

import attrs
from django.core.management.base import BaseCommand, CommandError, CommandParser
from django.test.utils import override_settings

from claims.balance import balance_exponents
from claims.checks import ClaimInputs, check
from claims.scan import scan
from energy.services import check_sandwich, dominant_class, dyadic_decompose, energy_of
from incidence.services import line_energy_experiment
from numeric.exceptions import EnergyLabError, InvariantViolation
from numeric.scalars import Backend, format_scalar
from regularize.certificate import dump_certificate, load_certificate, verify_certificate
from regularize.decomp import decomp
from setcore.files import write_set_file
from setcore.ops import SetOp, rep_function
from setcore.sets import promote
from workbench.models import Run
from workbench.reports import emit_report
from workbench.serializers import BALANCE, RunConfigSerializer

logger = logging.getLogger(__name__)

# Lets "-14/19:11/19" and "-1/6" through as option values.
NEGATIVE_VALUE = re.compile(r"^-\d[\d/:.]*$")

BASE_OPTIONS = {
    "verbosity", "settings", "pythonpath", "traceback", "no_color", "force_color", "skip_checks",
    "stdout", "stderr", "config", "command",
}


class UsageParser(CommandParser):
    """Sub-command parser whose errors are usage errors (exit 2) under call_command too."""

    def error(self, message):
        if self.called_from_command_line:
            super().error(message)
        raise CommandError(f"Error: {message}", returncode=2)


@attrs.frozen
class Outcome:
    exit_status: int = 0
    verdicts: dict = attrs.field(factory=dict)
    artifacts: list = attrs.field(factory=list)
    message: str = ""


class Command(BaseCommand):
    help = "Energy workbench: generate sets, compute energies, decompose, verify certificates, check claims and scan sizes."

    def add_arguments(self, parser):
        commands = parser.add_subparsers(dest="command", required=True, parser_class=UsageParser)

        def subcommand(name, help_text):
            sub = commands.add_parser(name, help=help_text)
            sub._negative_number_matcher = NEGATIVE_VALUE
            if name != "runs":
                sub.add_argument("--config", help="JSON file with RunConfig keys; command-line flags win.")
                sub.add_argument("--seed", type=int)
                sub.add_argument("--tolerance", type=float)
                sub.add_argument("--format", choices=["csv", "json"])
                sub.add_argument("--out")
                sub.add_argument("--record", action="store_true", default=None, help="Store the run in the run ledger.")
            return sub

        gen = subcommand("gen", "Generate a set and print or save it.")
        gen.add_argument("--set", "--A", dest="A")

        energy = subcommand("energy", "Exact energy E_k of A o B.")
        energy.add_argument("--set", "--A", dest="A")
        energy.add_argument("--B")
        energy.add_argument("--k")
        energy.add_argument("--op", choices=SetOp.values)
        energy.add_argument("--classes", action="store_true", default=None, help="Print the dyadic class table.")

        dec = subcommand("decomp", "Run the decomposition and print its certificate summary.")
        dec.add_argument("--A")
        dec.add_argument("--V")
        dec.add_argument("--op", choices=SetOp.values)
        dec.add_argument("--k")
        dec.add_argument("--c1")

        verify = subcommand("verify", "Re-verify a certificate file.")
        verify.add_argument("certificate", nargs="?")

        for name, help_text in (("check", "Check one claim."), ("scan", "Check one claim over increasing sizes.")):
            sub = subcommand(name, help_text)
            sub.add_argument("--claim")
            for set_name in ("A", "B", "C", "Q", "R", "U", "V"):
                sub.add_argument(f"--{set_name}")
            sub.add_argument("--f")
            sub.add_argument("--g")
            sub.add_argument("--T", type=int)
            sub.add_argument("--k")
            sub.add_argument("--c1")
            sub.add_argument("--lam")
            sub.add_argument("--sign", choices=["+", "-"])
            sub.add_argument("--op", choices=SetOp.values)
            if name == "check":
                sub.add_argument("--b1", help="Exponent bound const:energy, e.g. 13/6:-1/6.")
                sub.add_argument("--b2")
            else:
                sub.add_argument("--family")
                sub.add_argument("--sizes", nargs="+", type=int)
                sub.add_argument("--threads", type=int)

        incidence = subcommand("incidence", "Incidences of B x (AB + A) with the lines y = ax + a'.")
        incidence.add_argument("--A")
        incidence.add_argument("--B")

        runs = subcommand("runs", "List recorded runs.")
        runs.add_argument("--limit", type=int, default=20)

    def handle(self, *args, **options):
        command = options["command"]
        if command == "runs":
            return self.list_runs(options["limit"])

        config = self.load_config(options.get("config"))
        config.update({key: value for key, value in options.items() if key not in BASE_OPTIONS and value is not None})
        config["command"] = command
        tolerance = config.get("tolerance")
        context = override_settings(ENERGYLAB_TOLERANCE=tolerance) if tolerance is not None else nullcontext()

        with context:
            serializer = RunConfigSerializer(data=config)
            if not serializer.is_valid():
                raise CommandError(f"Invalid {command} configuration: {json.dumps(serializer.errors, sort_keys=True)}", returncode=2)
            data = serializer.validated_data
            logger.info("energylab %s %s", command, json.dumps(config, sort_keys=True))
            try:
                outcome = getattr(self, f"run_{command}")(data)
            except InvariantViolation as exc:
                outcome = Outcome(1, {"error": str(exc)}, message=f"Invariant violated: {exc}")
            except EnergyLabError as exc:
                outcome = Outcome(2, {"error": str(exc)}, message=str(exc))

        if data.get("record"):
            run = Run.objects.create(
                command=command,
                config=serializer.initial_data,
                exit_status=outcome.exit_status,
                verdicts=outcome.verdicts,
                artifacts=outcome.artifacts,
            )
            logger.info("Recorded %s", run)
        if outcome.exit_status:
            raise CommandError(outcome.message or f"{command} failed.", returncode=outcome.exit_status)

    def load_config(self, path) -> dict:
        if not path:
            return {}
        path = Path(path)
        if not path.is_file():
            raise CommandError(f"Config file {path} does not exist.", returncode=2)
        try:
            config = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CommandError(f"Config file {path} is not valid JSON: {exc}", returncode=2)
        if not isinstance(config, dict):
            raise CommandError(f"Config file {path} must hold a JSON object.", returncode=2)
        return config

    def emit(self, text: str) -> None:
        self.stdout.write(text, ending="" if text.endswith("\n") else "\n")

    def list_runs(self, limit: int) -> None:
        for run in Run.objects.all()[:limit]:
            verdict = run.verdicts.get("verdict", "")
            self.stdout.write(f"{run.id}\t{run.created_at:%Y-%m-%d %H:%M:%S}\t{run.command}\texit {run.exit_status}\t{verdict}")

    def run_gen(self, data) -> Outcome:
        A, label = data["sets"]["A"], data["labels"]["A"]
        if "out" in data:
            write_set_file(A, data["out"], comment=label)
            return Outcome(verdicts={"size": len(A)}, artifacts=[data["out"]])
        for x in A:
            self.stdout.write(format_scalar(x))
        return Outcome(verdicts={"size": len(A)})

    def run_energy(self, data) -> Outcome:
        A = data["sets"]["A"]
        B = data["sets"].get("B", A)
        if Backend.TOLERANT in (A.backend, B.backend):
            A, B = promote(A, Backend.TOLERANT), promote(B, Backend.TOLERANT)
        op, k = SetOp(data["op"]), data.get("k", 2)
        rep = rep_function(A, op, B)
        value = energy_of(rep, k)
        result = {"k": format_scalar(value.k), "op": op.value, "value": format_scalar(value.value), "exact": value.exact}
        outcome = Outcome(verdicts={"value": result["value"]})
        if data["classes"]:
            classes = dyadic_decompose(rep, k)
            chosen = dominant_class(rep, k, classes)
            sandwich = check_sandwich(rep, k, chosen)
            result["classes"] = [
                {"t": c.t, "size": c.size, "contribution": format_scalar(c.contribution), "dominant": c is chosen}
                for c in classes
            ]
            result["sandwich"] = sandwich.holds
            if not sandwich.holds:
                outcome = Outcome(1, {**outcome.verdicts, "sandwich": False}, message="Energy sandwich failed.")
        if data["format"] == "json":
            self.emit(json.dumps(result, sort_keys=True, indent=2))
        else:
            self.stdout.write(f"E_{result['k']}({op.value}) = {result['value']}")
            for row in result.get("classes", []):
                marker = " *" if row["dominant"] else ""
                self.stdout.write(f"t={row['t']}\t|D_t|={row['size']}\t{row['contribution']}{marker}")
        return outcome

    def run_decomp(self, data) -> Outcome:
        A = data["sets"]["A"]
        V = data["sets"].get("V", A)
        cert = decomp(A, V, data["op"], data.get("k", 2), data.get("c1", Fraction(1, 2)))
        report = verify_certificate(cert)
        artifacts = []
        if "out" in data:
            dump_certificate(cert, data["out"])
            artifacts.append(data["out"])
        summary = {
            "epsilon": format_scalar(cert.epsilon),
            "iterations": cert.iterations,
            "B": len(cert.B),
            "C": len(cert.C),
            "t": cert.t,
            "D_t": len(cert.D_t),
            "verified": report.passed,
        }
        if data["format"] == "json":
            self.emit(json.dumps(summary, sort_keys=True, indent=2))
        else:
            for key, value in summary.items():
                self.stdout.write(f"{key}: {value}")
        if not report.passed:
            return Outcome(1, summary, artifacts, "Certificate failed its own verification.")
        return Outcome(0, summary, artifacts)

    def run_verify(self, data) -> Outcome:
        cert = load_certificate(data["certificate"])
        report = verify_certificate(cert)
        rows = [
            {"name": c.name, "holds": c.holds, "binding": c.binding, "lhs": c.lhs, "relation": c.relation, "rhs": c.rhs, "detail": c.detail}
            for c in report.checks
        ]
        if data["format"] == "json":
            self.emit(json.dumps(rows, sort_keys=True, indent=2))
        else:
            for row in rows:
                status = "ok" if row["holds"] else ("FAIL" if row["binding"] else "note")
                self.stdout.write(f"{status}\t{row['name']}\t{row['lhs']} {row['relation']} {row['rhs']} {row['detail']}".rstrip())
        verdicts = {"verdict": "pass" if report.passed else "fail", "failures": len(report.failures)}
        if not report.passed:
            return Outcome(1, verdicts, message=f"{len(report.failures)} certificate check(s) failed.")
        return Outcome(0, verdicts)

    def claim_inputs(self, data, A, label) -> ClaimInputs:
        sets, labels = data["sets"], {**data["labels"], "A": label}
        return ClaimInputs(
            A,
            **{name: sets.get(name) for name in ("B", "C", "Q", "R", "U", "V")},
            f=data.get("f"),
            g=data.get("g"),
            T=data.get("T"),
            k=data.get("k"),
            c1=data.get("c1"),
            lam=data.get("lam"),
            sign=data["sign"],
            op=SetOp(data["op"]),
            family=label,
            labels=labels,
        )

    def run_check(self, data) -> Outcome:
        if data["claim"] == BALANCE:
            x, exponent = balance_exponents(data["b1"], data["b2"])
            self.stdout.write(f"energy exponent: {format_scalar(x)}")
            self.stdout.write(f"bound exponent: {format_scalar(exponent)}")
            return Outcome(verdicts={"x": format_scalar(x), "exponent": format_scalar(exponent)})
        inputs = self.claim_inputs(data, data["sets"]["A"], data["labels"]["A"])
        report = check(data["claim"], inputs)
        text = emit_report([report], data["format"], data.get("out"))
        self.emit(text)
        verdicts = {"verdict": report.verdict, "margin": report.margin}
        artifacts = [data["out"]] if "out" in data else []
        if report.verdict == "fail":
            reason = report.error or ", ".join(c.name for c in report.failed_conditions) or "main inequality"
            return Outcome(1, verdicts, artifacts, f"{report.claim.value} failed: {reason}.")
        return Outcome(0, verdicts, artifacts)

    def run_scan(self, data) -> Outcome:
        def build(A, n):
            return self.claim_inputs(data, A, f"{data['family_spec']}:{n}")

        result = scan(data["claim"], data["family_spec"], data["sizes"], build, data.get("threads"))
        text = emit_report(fmt=data["format"], path=data.get("out"), scan=result)
        self.emit(text)
        verdicts = {"verdict": result.verdict, "slope": result.slope, "pass_mode": str(result.pass_mode)}
        artifacts = [data["out"]] if "out" in data else []
        if result.failed_cells:
            return Outcome(1, verdicts, artifacts, f"{len(result.failed_cells)} scan cell(s) failed.")
        return Outcome(0, verdicts, artifacts)

    def run_incidence(self, data) -> Outcome:
        A = data["sets"]["A"]
        B = data["sets"].get("B", A)
        report = line_energy_experiment(A, B)
        summary = {
            "A": report.size_a,
            "B": report.size_b,
            "AB+A": report.size_c,
            "incidences": report.incidences,
            "lower_bound": report.lower_bound,
            "E4x(A)": report.e4_ratio,
            "rhs": report.rhs,
            "ratio": report.ratio,
        }
        if data["format"] == "json":
            self.emit(json.dumps(summary, sort_keys=True, indent=2))
        else:
            for key, value in summary.items():
                self.stdout.write(f"{key}: {value}")
        return Outcome(verdicts={"incidences": report.incidences, "ratio": report.ratio})
