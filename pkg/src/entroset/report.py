"""Scan configuration and result types shared by every checker.

A scan walks a grid or a seeded random sample, records the worst margin it
saw and where, and passes iff that margin clears ``-tolerance``.  Reports
are plain data: they serialize to JSON documents and CSV rows, and two
reports over partitions of the same scan merge by taking the minimum.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any

__all__ = [
    "PreconditionError",
    "ScanConfig",
    "ScanReport",
    "make_report",
    "merge_reports",
    "report_to_json",
    "report_from_json",
    "report_csv_header",
    "report_csv_row",
]


class PreconditionError(ValueError):
    """User-supplied data violates a checker's stated precondition.

    Raised when an input fails the hypothesis of the inequality being
    checked (a mean on the wrong side of a threshold, a parameter outside
    its admissible interval).  Distinguished from a failed scan: the scan
    never ran.
    """


@dataclass(frozen=True)
class ScanConfig:
    """Knobs for a scan: grid geometry, sample budget, seed, and tolerance."""

    grid_step: float = 1e-4
    random_samples: int = 100_000
    seed: int = 42
    tolerance: float = 1e-6
    range_lo: float = 0.0
    range_hi: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.grid_step) and self.grid_step > 0.0):
            raise ValueError(f"grid_step must be positive, got {self.grid_step!r}")
        if self.random_samples < 0:
            raise ValueError("random_samples must be >= 0")
        if not (math.isfinite(self.tolerance) and self.tolerance >= 0.0):
            raise ValueError(f"tolerance must be >= 0, got {self.tolerance!r}")
        if not (self.range_lo < self.range_hi):
            raise ValueError(
                f"empty range [{self.range_lo!r}, {self.range_hi!r}]"
            )

    def grid_points(self) -> int:
        return int(round((self.range_hi - self.range_lo) / self.grid_step)) + 1


@dataclass(frozen=True)
class ScanReport:
    """Outcome of one scan: worst margin, its witness, and the verdict."""

    name: str
    points_checked: int
    min_margin: float
    argmin_witness: tuple
    passed: bool
    tolerance: float
    config: dict = field(default_factory=dict)
    details: dict | None = None


def make_report(
    name: str,
    points_checked: int,
    min_margin: float,
    argmin_witness: tuple,
    tolerance: float,
    config: dict | None = None,
    details: dict | None = None,
) -> ScanReport:
    """Build a report with the pass verdict derived from margin vs tolerance."""
    return ScanReport(
        name=name,
        points_checked=int(points_checked),
        min_margin=float(min_margin),
        argmin_witness=tuple(argmin_witness),
        passed=bool(min_margin >= -tolerance),
        tolerance=float(tolerance),
        config=dict(config or {}),
        details=details,
    )


def merge_reports(a: ScanReport, b: ScanReport) -> ScanReport:
    """Combine two partitions of the same scan; order of the parts is irrelevant."""
    if a.name != b.name:
        raise ValueError(f"cannot merge reports for {a.name!r} and {b.name!r}")
    if a.tolerance != b.tolerance:
        raise ValueError("cannot merge reports with different tolerances")
    lead = a if a.min_margin <= b.min_margin else b
    return ScanReport(
        name=a.name,
        points_checked=a.points_checked + b.points_checked,
        min_margin=lead.min_margin,
        argmin_witness=lead.argmin_witness,
        passed=a.passed and b.passed,
        tolerance=a.tolerance,
        config=lead.config,
        details=lead.details,
    )


def _jsonable(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    return float(value)


def report_to_json(report: ScanReport) -> dict:
    doc = {
        "name": report.name,
        "points_checked": report.points_checked,
        "min_margin": report.min_margin,
        "witness": _jsonable(report.argmin_witness),
        "passed": report.passed,
        "tolerance": report.tolerance,
        "config": _jsonable(report.config),
    }
    if report.details is not None:
        doc["details"] = _jsonable(report.details)
    return doc


def report_from_json(doc: dict) -> ScanReport:
    def _tupled(v: Any) -> Any:
        return tuple(_tupled(x) for x in v) if isinstance(v, list) else v

    return ScanReport(
        name=doc["name"],
        points_checked=int(doc["points_checked"]),
        min_margin=float(doc["min_margin"]),
        argmin_witness=_tupled(doc["witness"]),
        passed=bool(doc["passed"]),
        tolerance=float(doc["tolerance"]),
        config=dict(doc.get("config", {})),
        details=doc.get("details"),
    )


def report_csv_header() -> list[str]:
    return ["name", "points_checked", "min_margin", "passed", "tolerance", "witness"]


def report_csv_row(report: ScanReport) -> list[str]:
    """One aggregation-friendly CSV row; the witness is JSON-encoded in place."""
    return [
        report.name,
        str(report.points_checked),
        repr(report.min_margin),
        "1" if report.passed else "0",
        repr(report.tolerance),
        json.dumps(_jsonable(report.argmin_witness)),
    ]


def reports_to_csv(reports: list[ScanReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report_csv_header())
    for r in reports:
        writer.writerow(report_csv_row(r))
    return buf.getvalue()


__all__.append("reports_to_csv")
