from __future__ import annotations

from typing import Any

__all__ = [
    "EXIT_BLOW_UP",
    "EXIT_INVALID",
    "EXIT_OK",
    "EXIT_VERIFICATION_FAILED",
    "BlowUpError",
    "ConfigError",
    "ContractError",
    "DomainError",
    "StabilityError",
    "SwirlMHDError",
    "VerificationFailure",
]

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_INVALID = 2
EXIT_BLOW_UP = 3


class SwirlMHDError(Exception):
    """Base error; carries the process exit code the CLI reports for it."""

    exit_code: int = EXIT_INVALID

    def __init__(self, message: str, data: dict[str, Any] | None = None) -> None:
        super().__init__(message)
        self.data = data

    def to_error_obj(self) -> dict[str, Any]:
        return {"exit_code": self.exit_code, "message": str(self), "data": self.data}


class DomainError(SwirlMHDError, ValueError):
    """A parameter lies outside the set where the formula or operation is defined."""

    @classmethod
    def out_of_range(cls, name: str, value: Any, admissible: str) -> DomainError:
        return cls(f"{name}={value} is outside the admissible set {admissible}", {"name": name, "admissible": admissible})

    @classmethod
    def negative(cls, name: str, value: Any) -> DomainError:
        return cls(f"{name}={value} must be nonnegative", {"name": name})


class ContractError(SwirlMHDError, ValueError):
    """A caller broke an operator precondition (parity, grid identity, spectral support)."""

    @classmethod
    def parity(cls, operation: str, expected: str, actual: str) -> ContractError:
        return cls(
            f"{operation} requires a {expected} field, got {actual}",
            {"operation": operation, "expected": expected, "actual": actual},
        )

    @classmethod
    def grid_mismatch(cls, operation: str) -> ContractError:
        return cls(f"{operation} received fields on different grids", {"operation": operation})


class ConfigError(SwirlMHDError, ValueError):
    """Invalid run configuration; ``line`` is 1-based, 0 when the key is missing altogether."""

    def __init__(self, message: str, *, line: int = 0, key: str | None = None) -> None:
        location = f"line {line}" if line else "config"
        super().__init__(f"{location}: {message}", {"line": line, "key": key})
        self.line = line
        self.key = key


class StabilityError(SwirlMHDError, RuntimeError):
    """The time step violates the explicit stability bound of the scheme."""

    def __init__(self, dt: float, bound: float, time: float = 0.0) -> None:
        super().__init__(
            f"dt={dt:.6g} exceeds the stability bound {bound:.6g} at t={time:.6g}",
            {"dt": dt, "bound": bound, "time": time},
        )
        self.dt = dt
        self.bound = bound


class BlowUpError(SwirlMHDError, RuntimeError):
    """A field became non-finite during time stepping."""

    exit_code = EXIT_BLOW_UP

    def __init__(self, field: str, time: float) -> None:
        super().__init__(f"non-finite values in {field} at t={time:.6g}", {"field": field, "time": time})
        self.field = field
        self.time = time
        # rows sampled before the failure, attached by the runner
        self.trajectory: Any = None


class VerificationFailure(SwirlMHDError, AssertionError):
    """One or more acceptance checks failed."""

    exit_code = EXIT_VERIFICATION_FAILED

    def __init__(self, suite: str, failed: list[str]) -> None:
        super().__init__(f"suite {suite!r} failed: {', '.join(failed)}", {"suite": suite, "failed": failed})
        self.suite = suite
        self.failed = failed
