"""Deterministic machine-readable verification reports."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field

__all__ = ["CheckRecord", "Report", "CheckRunner"]


@dataclass(frozen=True)
class CheckRecord:
    check: str
    anchor: str
    status: str  # "pass" | "fail" | "degenerate"
    residual: float | None
    runtime_ms: float | None

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "anchor": self.anchor,
            "status": self.status,
            "residual": self.residual,
            "runtime_ms": self.runtime_ms,
        }


@dataclass
class Report:
    command: str
    config: dict
    records: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.status == "pass" for r in self.records)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "checks": [r.to_dict() for r in self.records],
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["check", "anchor", "status", "residual", "runtime_ms"])
            for r in self.records:
                writer.writerow([r.check, r.anchor, r.status, r.residual, r.runtime_ms])


class CheckRunner:
    """Runs checks, collecting one record per check.

    Check callables return ``(ok, residual)`` where residual may be None for
    exact pass/fail checks.  Timings are recorded only when requested so that
    default reports are byte-identical across runs.
    """

    def __init__(self, report: Report, timings: bool = False):
        self.report = report
        self.timings = timings

    def run(self, check: str, anchor: str, fn) -> bool:
        start = time.perf_counter()
        try:
            ok, residual = fn()
            status = "pass" if ok else "fail"
        except Exception as exc:  # surface as a failing record, keep going
            status = "fail"
            residual = None
            print(f"  [error] {check}: {exc}")
        elapsed = (time.perf_counter() - start) * 1000.0
        record = CheckRecord(
            check=check,
            anchor=anchor,
            status=status,
            residual=None if residual is None else float(residual),
            runtime_ms=round(elapsed, 3) if self.timings else None,
        )
        self.report.records.append(record)
        marker = "ok " if status == "pass" else "FAIL"
        resid = "" if residual is None else f"  residual={residual:.3e}"
        print(f"  [{marker}] {check}{resid}")
        return status == "pass"

    def add(self, check: str, anchor: str, status: str, residual=None) -> None:
        self.report.records.append(
            CheckRecord(
                check=check,
                anchor=anchor,
                status=status,
                residual=None if residual is None else float(residual),
                runtime_ms=None,
            )
        )
        print(f"  [{status}] {check}")
