from __future__ import annotations

import csv
import io
from collections.abc import Callable, Sequence
from contextlib import suppress
from pathlib import Path
from typing import TextIO

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.integrate import trapezoid

from .functionals import DiagnosticsRow
from .utils import format_float

__all__ = [
    "CsvSink",
    "RowColumnsMismatchError",
    "Trajectory",
    "TrajectoryRecorder",
    "TrajectoryUnavailableError",
    "render_csv",
]


class RowColumnsMismatchError(ValueError):
    """Raised when a row does not carry exactly the recorder's columns."""

    def __init__(self, missing: Sequence[str], unexpected: Sequence[str]) -> None:
        message = f"TrajectoryRecorder row mismatch: missing {sorted(missing)}, unexpected {sorted(unexpected)}"
        super().__init__(message)


class TrajectoryUnavailableError(RuntimeError):
    """Raised when a trajectory is requested before any row was recorded."""

    def __init__(self) -> None:
        super().__init__("TrajectoryRecorder has not recorded any rows yet")


class Trajectory(BaseModel):
    """Immutable table of diagnostics rows in time order."""

    model_config = ConfigDict(frozen=True)

    columns: tuple[str, ...]
    rows: tuple[DiagnosticsRow, ...]

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def times(self) -> np.ndarray:
        return np.array([row.time for row in self.rows])

    def column(self, name: str) -> np.ndarray:
        return np.array([row[name] for row in self.rows])

    def integral(self, name: str) -> float:
        """Trapezoid time integral of one column, e.g. the L^1-in-time Besov norm."""
        if len(self.rows) < 2:
            return 0.0
        return float(trapezoid(self.column(name), self.times))

    def max_increase(self, name: str) -> float:
        """Largest increase of a column between consecutive samples (0 if it never grows)."""
        values = self.column(name)
        if values.size < 2:
            return 0.0
        return max(0.0, float(np.max(np.diff(values))))

    def to_csv(self) -> str:
        return render_csv(self.columns, self.rows)


def _csv_line(columns: Sequence[str], row: DiagnosticsRow) -> list[str]:
    return [format_float(value) for value in row.values(columns)]


def render_csv(columns: Sequence[str], rows: Sequence[DiagnosticsRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(_csv_line(columns, row))
    return buffer.getvalue()


class TrajectoryRecorder:
    """Accumulate :class:`DiagnosticsRow` samples into a :class:`Trajectory`.

    Subscribers are called after every :meth:`apply` with the new row; the CSV sink is one.
    """

    def __init__(self, columns: Sequence[str]) -> None:
        self.columns = tuple(columns)
        self._rows: list[DiagnosticsRow] = []
        self._subscribers: list[Callable[[DiagnosticsRow], None]] = []

    def reset(self) -> None:
        self._rows.clear()

    def subscribe(self, callback: Callable[[DiagnosticsRow], None]) -> Callable[[], None]:
        """Register ``callback``; returns an ``unsubscribe`` callable."""
        self._subscribers.append(callback)

        def unsubscribe() -> None:
            with suppress(ValueError):
                self._subscribers.remove(callback)

        return unsubscribe

    def apply(self, row: DiagnosticsRow) -> DiagnosticsRow:
        expected = set(self.columns) - {"time"}
        present = set(row.norms)
        if expected != present:
            raise RowColumnsMismatchError(expected - present, present - expected)
        self._rows.append(row)
        for callback in list(self._subscribers):
            callback(row)
        return row

    def __len__(self) -> int:
        return len(self._rows)

    def snapshot(self) -> Trajectory:
        if not self._rows:
            raise TrajectoryUnavailableError()
        return Trajectory(columns=self.columns, rows=tuple(self._rows))


class CsvSink:
    """Streaming CSV writer: the header on open, one flushed line per row."""

    def __init__(self, path: str | Path, columns: Sequence[str]) -> None:
        self.path = Path(path)
        self.columns = tuple(columns)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle: TextIO | None = self.path.open("w", encoding="utf-8", newline="")
        self._writer = csv.writer(self._handle, lineterminator="\n")
        self._writer.writerow(self.columns)
        self._handle.flush()

    def __call__(self, row: DiagnosticsRow) -> None:
        if self._handle is None:
            return
        self._writer.writerow(_csv_line(self.columns, row))
        self._handle.flush()

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None

    def __enter__(self) -> CsvSink:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()
