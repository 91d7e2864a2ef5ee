"""Verification reports and sweep summaries as deterministic text."""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from ..utils import format_float

__all__ = ["Check", "SuiteReport", "SweepPoint", "render_report", "render_sweep", "write_text"]


def _number(value: float) -> str:
    return format(value, ".6e") if math.isfinite(value) else str(value)


class Check(BaseModel):
    """One named assertion: ``value`` against ``expectation`` (a human-readable bound)."""

    model_config = ConfigDict(frozen=True)

    name: str
    value: float
    passed: bool
    expectation: str

    @classmethod
    def at_most(cls, name: str, value: float, bound: float) -> Check:
        return cls(name=name, value=value, passed=bool(value <= bound), expectation=f"<= {_number(bound)}")

    @classmethod
    def within(cls, name: str, value: float, low: float, high: float) -> Check:
        return cls(
            name=name,
            value=value,
            passed=bool(low <= value <= high),
            expectation=f"in [{_number(low)}, {_number(high)}]",
        )

    @classmethod
    def finite(cls, name: str, value: float) -> Check:
        return cls(name=name, value=value, passed=math.isfinite(value), expectation="finite")

    def render(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"  [{status}] {self.name} = {_number(self.value)} ({self.expectation})"


class SuiteReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    suite: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed(self) -> list[str]:
        return [check.name for check in self.checks if not check.passed]

    def render(self) -> str:
        header = f"suite {self.suite}: {'PASS' if self.passed else 'FAIL'} ({len(self.checks)} checks)"
        return "\n".join([header, *(check.render() for check in self.checks)])


def render_report(reports: Sequence[SuiteReport], seed: int) -> str:
    passed = all(report.passed for report in reports)
    lines = [f"swirlmhd verification report (seed {seed})", ""]
    for report in reports:
        lines.append(report.render())
        lines.append("")
    lines.append(f"overall: {'PASS' if passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


class SweepPoint(BaseModel):
    """Summary of one sweep run; the ratios are NaN when the run blew up before a sample."""

    model_config = ConfigDict(frozen=True)

    value: str
    final_M: float
    max_M_over_M0: float
    ledger_over_2M0: float
    smallness_passed: bool
    blew_up: bool


SWEEP_COLUMNS = ("value", "final_M", "max_M_over_M0", "ledger_over_2M0", "smallness_passed", "blew_up")


def render_sweep(param: str, points: Sequence[SweepPoint]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow((param, *SWEEP_COLUMNS[1:]))
    for point in points:
        writer.writerow((
            point.value,
            format_float(point.final_M),
            format_float(point.max_M_over_M0),
            format_float(point.ledger_over_2M0),
            str(point.smallness_passed).lower(),
            str(point.blew_up).lower(),
        ))
    return buffer.getvalue()


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
