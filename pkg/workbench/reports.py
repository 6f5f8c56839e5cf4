"""CSV and JSON emitters for claim reports and scans."""

import csv
import io
import json
import logging
import math
from pathlib import Path

from numeric.exceptions import ParameterError
from numeric.scalars import format_scalar

from .serializers import ClaimReportSerializer, ScanSerializer

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("claim", "family", "n", "lhs", "rhs", "ratio", "pass_mode", "verdict")


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return format_scalar(value)


def report_row(report) -> list:
    return [
        str(report.claim),
        report.family,
        _cell(report.n),
        _cell(report.lhs),
        _cell(report.rhs),
        _cell(report.ratio),
        str(report.pass_mode),
        report.verdict,
    ]


def reports_csv(reports, scan=None) -> str:
    """One row per report; a scan adds a trailing row with ``n = slope`` and the slope in ``ratio``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for report in reports:
        writer.writerow(report_row(report))
    if scan is not None:
        writer.writerow([str(scan.claim), scan.family, "slope", "", "", _cell(scan.slope), str(scan.pass_mode), scan.verdict])
    return buffer.getvalue()


def reports_json(reports=(), scan=None) -> str:
    if scan is not None:
        data = ScanSerializer(scan).data
    else:
        data = ClaimReportSerializer(reports, many=True).data
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def emit_report(reports=(), fmt: str = "csv", path=None, scan=None) -> str:
    """Render ``reports`` (or a whole ``scan``) and write it to ``path`` when given."""
    if scan is not None:
        reports = scan.reports
    text = reports_json(reports, scan) if fmt == "json" else reports_csv(reports, scan)
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise ParameterError(f"cannot write report to {path}: {exc.strerror}.") from exc
        logger.info("Wrote %s report with %s row(s) to %s", fmt, len(reports), path)
    return text
