"""Size scans: one claim, one family, increasing ``n``."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Optional

import attrs
import numpy as np
from django.conf import settings

from generators.families import FamilySpec, generate
from numeric.exceptions import EnergyLabError, ParameterError

from .checks import ClaimId, ClaimInputs, ClaimReport, PassMode, check

logger = logging.getLogger(__name__)


def scan_threads() -> int:
    return max(1, int(getattr(settings, "ENERGYLAB_THREADS", 1)))


@attrs.frozen
class ScanResult:
    claim: ClaimId
    family: str
    sizes: tuple
    reports: tuple
    slope: Optional[float]

    @property
    def pass_mode(self) -> str:
        modes = {r.pass_mode for r in self.reports if not r.error}
        return PassMode.EXACT if modes == {PassMode.EXACT} else PassMode.TREND

    @property
    def failed_cells(self) -> list:
        return [r for r in self.reports if r.verdict == "fail"]

    @property
    def verdict(self) -> str:
        if self.failed_cells:
            return "fail"
        if self.pass_mode == PassMode.EXACT:
            return "pass"
        return "pass" if self.slope is not None and self.slope >= 0 else "fail"


def fit_slope(sizes, margins) -> Optional[float]:
    """Least-squares slope of the log-margin against ``log n``; cells without a margin are skipped."""
    points = [(math.log(n), m) for n, m in zip(sizes, margins) if m is not None and math.isfinite(m)]
    if len(points) < 2:
        return None
    x, y = np.array(points).T
    return float(np.polyfit(x, y, 1)[0])


def check_sizes(sizes) -> tuple:
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) < 3:
        raise ParameterError(f"a scan needs at least 3 sizes, got {len(sizes)}.")
    if any(a >= b for a, b in zip(sizes, sizes[1:])):
        raise ParameterError(f"scan sizes must be strictly increasing, got {list(sizes)}.")
    return sizes


def scan(
    claim,
    family: FamilySpec,
    sizes,
    build: Callable[[object, int], ClaimInputs] = None,
    threads: int = None,
) -> ScanResult:
    """Run ``claim`` on ``family`` at each size.

    ``build(A, n)`` turns the generated set into claim inputs; the default
    uses ``A`` alone. A cell that raises becomes a failed report, so one bad
    size never aborts the scan.
    """
    claim = ClaimId(claim)
    sizes = check_sizes(sizes)
    label = str(family)
    build = build or (lambda A, n: ClaimInputs(A, family=label))

    def cell(n: int) -> ClaimReport:
        try:
            A = generate(family, n)
            return check(claim, attrs.evolve(build(A, n), family=label))
        except EnergyLabError as exc:
            logger.warning("Scan cell %s n=%s failed: %s", claim.value, n, exc)
            return ClaimReport.failed(claim, label, n, str(exc))

    workers = min(threads or scan_threads(), len(sizes))
    logger.info("Scanning %s on %s over %s with %s thread(s)", claim.value, label, list(sizes), workers)
    if workers == 1:
        reports = tuple(cell(n) for n in sizes)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = tuple(pool.map(cell, sizes))
    slope = fit_slope(sizes, [r.margin for r in reports])
    result = ScanResult(claim, label, sizes, reports, slope)
    logger.info("Scan %s on %s: slope %s, verdict %s", claim.value, label, slope, result.verdict)
    return result
