import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from claims.checks import ClaimId, ClaimInputs, check
from generators.families import generate, parse_family
from numeric.exceptions import ParameterError
from setcore.files import read_set_file
from setcore.sets import from_values
from workbench.models import Run
from workbench.reports import CSV_COLUMNS, emit_report
from workbench.serializers import RunConfigSerializer


def energylab(*args):
    out = StringIO()
    call_command("energylab", *args, stdout=out)
    return out.getvalue()


class CommandTestMixin:
    def assertExitStatus(self, status, *args):
        with self.assertRaises(CommandError) as cm:
            energylab(*args)
        self.assertEqual(cm.exception.returncode, status, str(cm.exception))
        return cm.exception


class BalanceCommandTests(CommandTestMixin, SimpleTestCase):
    def test_prints_both_exponents(self):
        output = energylab("check", "--claim", "balance", "--b1", "13/6:-1/6", "--b2", "-14/19:11/19")
        self.assertIn("energy exponent: 331/85", output)
        self.assertIn("bound exponent: 129/85", output)

    def test_needs_both_bounds(self):
        self.assertExitStatus(2, "check", "--claim", "balance", "--b1", "13/6:-1/6")

    def test_parallel_bounds(self):
        self.assertExitStatus(2, "check", "--claim", "balance", "--b1", "1:1", "--b2", "2:1")


class EnergyCommandTests(CommandTestMixin, SimpleTestCase):
    def test_exact_value(self):
        self.assertEqual(energylab("energy", "--set", "ap:0:1:4", "--k", "2").strip(), "E_2(diff) = 44")

    def test_class_table(self):
        output = energylab("energy", "--set", "ap:0:1:8", "--k", "3", "--classes")
        self.assertIn("t=4", output)
        self.assertIn(" *", output)

    def test_json(self):
        data = json.loads(energylab("energy", "--set", "gp:1:2:4", "--k", "2", "--op", "ratio", "--format", "json"))
        self.assertEqual(data["value"], "44")
        self.assertTrue(data["exact"])

    def test_zero_tolerance(self):
        self.assertEqual(energylab("energy", "--set", "ap:0:1:4", "--tolerance", "0").strip(), "E_2(diff) = 44")
        data = json.loads(energylab("energy", "--set", "convex:exp:4", "--tolerance", "0", "--format", "json"))
        self.assertEqual(data["value"], "28")

    def test_negative_tolerance(self):
        self.assertExitStatus(2, "energy", "--set", "ap:0:1:4", "--tolerance", "-1")


class CertificateCommandTests(CommandTestMixin, SimpleTestCase):
    def test_decomp_then_verify(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = str(Path(tmp) / "cert.txt")
            energylab("decomp", "--A", "gp:1:2:64", "--V", "gp:1:2:64", "--op", "ratio", "--k", "3", "--c1", "1/4", "--out", path)
            output = energylab("verify", path)
        self.assertNotIn("FAIL", output)
        self.assertIn("ok\treplay reproduces the certificate", output)

    def test_tampered_certificate(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "cert.txt"
            output = energylab("decomp", "--A", "ap:0:1:64", "--k", "2", "--c1", "1/2", "--out", str(path))
            self.assertIn("t: 32", output)
            path.write_text(path.read_text().replace("\nt: 32\n", "\nt: 16\n"))
            self.assertExitStatus(1, "verify", str(path))

    def test_missing_certificate(self):
        self.assertExitStatus(2, "verify", "/nonexistent/cert.txt")


class CheckCommandTests(CommandTestMixin, SimpleTestCase):
    def test_exact_claim_csv(self):
        lines = energylab("check", "--claim", "cs_sandwich", "--A", "rand:50:3:6").splitlines()
        self.assertEqual(lines[0], ",".join(CSV_COLUMNS))
        self.assertEqual(len(lines), 2)
        self.assertTrue(lines[1].startswith("cs_sandwich,rand:50:0x3:6,6,"))
        self.assertTrue(lines[1].endswith(",exact,pass"))

    def test_side_condition_is_a_usage_error(self):
        self.assertExitStatus(2, "check", "--claim", "lem_e3", "--A", "gp:1:2:8", "--T", "100")

    def test_unknown_claim(self):
        self.assertExitStatus(2, "check", "--claim", "lem_nothing", "--A", "ap:1:1:8")

    def test_missing_set_file(self):
        self.assertExitStatus(2, "check", "--claim", "cs_sandwich", "--A", "/nonexistent/set.txt")

    def test_config_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.json"
            path.write_text(json.dumps({"claim": "cs_sandwich", "A": "ap:1:1:5", "format": "json"}))
            data = json.loads(energylab("check", "--config", str(path)))
        self.assertEqual(data[0]["verdict"], "pass")
        self.assertEqual(data[0]["pass_mode"], "exact")

    def test_config_file_rejects_unknown_keys(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "run.json"
            path.write_text(json.dumps({"claim": "cs_sandwich", "A": "ap:1:1:5", "colour": "blue"}))
            error = self.assertExitStatus(2, "check", "--config", str(path))
        self.assertIn("colour", str(error))


class ScanCommandTests(CommandTestMixin, SimpleTestCase):
    def test_trend_scan_rows(self):
        lines = energylab(
            "scan", "--claim", "thm_main_38", "--family", "ap:1:1", "--sizes", "8", "16", "32", "--f", "square"
        ).splitlines()
        self.assertEqual(len(lines), 5)
        self.assertEqual([line.split(",")[2] for line in lines[1:4]], ["8", "16", "32"])
        self.assertTrue(lines[4].startswith("thm_main_38,ap:1:1,slope,,,"))
        self.assertTrue(lines[4].endswith(",constant-free-trend,pass"))

    def test_output_independent_of_threads(self):
        args = ["scan", "--claim", "cs_sandwich", "--family", "rand:40:9", "--sizes", "4", "5", "6", "7"]
        self.assertEqual(energylab(*args, "--threads", "1"), energylab(*args, "--threads", "3"))

    def test_sizes_must_increase(self):
        self.assertExitStatus(2, "scan", "--claim", "thm_main_38", "--family", "ap:1:1", "--sizes", "8", "4", "16", "--f", "square")

    def test_failed_cells_exit_one(self):
        self.assertExitStatus(1, "scan", "--claim", "thm_incidence", "--family", "ap:0:1", "--sizes", "3", "4", "5")


class GenAndIncidenceCommandTests(SimpleTestCase):
    def test_gen_prints_values(self):
        self.assertEqual(energylab("gen", "--set", "ap:0:2:3").split(), ["0", "2", "4"])

    def test_gen_writes_a_set_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "A.txt"
            energylab("gen", "--set", "gp:1:3:5", "--out", str(path))
            self.assertEqual(read_set_file(path), generate(parse_family("gp:1:3"), 5))

    def test_incidence(self):
        output = energylab("incidence", "--A", "ap:1:1:5")
        self.assertIn("incidences: ", output)
        self.assertIn("lower_bound: 125", output)


class RunLedgerTests(TestCase):
    def test_record(self):
        energylab("check", "--claim", "balance", "--b1", "13/6:-1/6", "--b2", "-14/19:11/19", "--record")
        run = Run.objects.get()
        self.assertEqual(run.command, Run.Command.CHECK)
        self.assertEqual(run.exit_status, 0)
        self.assertEqual(run.verdicts, {"x": "331/85", "exponent": "129/85"})
        self.assertIn("check", energylab("runs"))

    def test_failed_run_is_recorded(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "cert.txt"
            energylab("decomp", "--A", "ap:0:1:64", "--k", "2", "--c1", "1/2", "--out", str(path))
            path.write_text(path.read_text().replace("\nt: 32\n", "\nt: 16\n"))
            with self.assertRaises(CommandError):
                energylab("verify", str(path), "--record")
        run = Run.objects.get()
        self.assertEqual(run.exit_status, 1)
        self.assertEqual(run.verdicts["verdict"], "fail")

    def test_nothing_recorded_by_default(self):
        energylab("energy", "--set", "ap:0:1:4")
        self.assertFalse(Run.objects.exists())


class ReportTests(SimpleTestCase):
    def test_empty_report_is_header_only(self):
        self.assertEqual(emit_report([]), ",".join(CSV_COLUMNS) + "\n")

    def test_exact_pass_row(self):
        report = check(ClaimId.HOLDER_MIXED, ClaimInputs(from_values([0, 1, 3])))
        rows = emit_report([report]).splitlines()
        self.assertEqual(len(rows), 2)
        self.assertTrue(rows[1].endswith(",exact,pass"))

    def test_json_keeps_exact_values(self):
        report = check(ClaimId.CS_SANDWICH, ClaimInputs(from_values([0, 1, 2, 3])))
        data = json.loads(emit_report([report], "json"))
        self.assertEqual(data[0]["lhs"], str(44**2))
        self.assertEqual(data[0]["conditions"][0]["holds"], True)

    def test_unwritable_path(self):
        with self.assertRaises(ParameterError):
            emit_report([], path="/nonexistent/dir/report.csv")


class RunConfigTests(SimpleTestCase):
    def test_defaults(self):
        serializer = RunConfigSerializer(data={"command": "energy", "A": "ap:0:1:4"})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data["format"], "csv")
        self.assertEqual(len(serializer.validated_data["sets"]["A"]), 4)

    def test_errors(self):
        cases = [
            {"command": "energy"},
            {"command": "energy", "A": "ap:0:1:4", "k": "two"},
            {"command": "check", "claim": "thm_main_38"},
            {"command": "scan", "claim": "balance", "family": "ap:0:1", "sizes": [1, 2, 3]},
            {"command": "energy", "A": "ap:0:1:4", "tolerance": -1},
            {"command": "energy", "A": "ap:0:1:4", "f": "banana"},
        ]
        for data in cases:
            self.assertFalse(RunConfigSerializer(data=data).is_valid(), data)
