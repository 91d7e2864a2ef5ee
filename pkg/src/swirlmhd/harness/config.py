"""Run configuration: pydantic models plus the flat ``section.key = value`` text format."""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..evolve.state import StepperConfig
from ..exceptions import ConfigError
from ..exponents import P_MAX, v_dissipation_prefactor
from ..grid import Grid

__all__ = [
    "Formulation",
    "GridConfig",
    "InitialConfig",
    "LPConfig",
    "OutputConfig",
    "RunConfig",
    "dump_config",
    "load_config",
    "parse_config",
]

SECTIONS = ("grid", "stepper", "initial", "lp", "output")


class Formulation(str, Enum):
    PRIMITIVE = "primitive"
    REFORM = "reform"
    BOTH = "both"


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class GridConfig(_Section):
    Nr: int = Field(default=64, ge=8)
    Nz: int = Field(default=64, ge=8)
    Rmax: float = Field(default=4.0, gt=0)
    Lz: float = Field(default=8.0, gt=0)

    def to_grid(self) -> Grid:
        return Grid(Nr=self.Nr, Nz=self.Nz, Rmax=self.Rmax, Lz=self.Lz)


class InitialConfig(_Section):
    """Bump initial data; ``calibrated`` solves for (A_u, A_b) at ``margin`` times the smallness bounds."""

    generator: Literal["bump", "calibrated"] = "calibrated"
    A_u: float = 0.0
    A_b: float = 0.0
    A_omega: float = 0.01
    radius_fraction: float = Field(default=0.5, gt=0, lt=1)
    height_fraction: float = Field(default=0.25, gt=0, le=0.5)
    center_fraction: float = Field(default=0.5, gt=0, lt=1)
    margin: float = Field(default=0.5, gt=0, lt=1)

    @model_validator(mode="after")
    def _support_inside(self) -> InitialConfig:
        low = self.center_fraction - self.height_fraction
        high = self.center_fraction + self.height_fraction
        if low < 0.0 or high > 1.0:
            raise ValueError(f"bump axial support [{low}, {high}] (fractions of Lz) leaves the domain")
        return self


class LPConfig(_Section):
    enabled: bool = False
    N: int = Field(default=32, ge=8)
    L: float = Field(default=16.0, gt=0)

    @model_validator(mode="after")
    def _power_of_two(self) -> LPConfig:
        if self.N & (self.N - 1):
            raise ValueError(f"N={self.N} must be a power of two")
        return self


class OutputConfig(_Section):
    """``csv`` is the diagnostics file; snapshots go to ``snapshots`` every ``snapshot_every`` samples (0: last only)."""

    csv: str | None = None
    snapshots: str | None = None
    snapshot_every: int = Field(default=0, ge=0)


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(default="run", pattern=r"^[A-Za-z0-9_.-]+$")
    p: float = 1.02
    c0: float = Field(default=1e-3, gt=0)
    formulation: Formulation = Formulation.PRIMITIVE
    seed: int = Field(default=7, ge=0)
    grid: GridConfig = GridConfig()
    stepper: StepperConfig = StepperConfig()
    initial: InitialConfig = InitialConfig()
    lp: LPConfig = LPConfig()
    output: OutputConfig = OutputConfig()

    @field_validator("p")
    @classmethod
    def _admissible_p(cls, p: float) -> float:
        if not 1.0 < p <= float(P_MAX):
            raise ValueError(f"p={p} is outside ]1, 63/61]")
        if not v_dissipation_prefactor(p) > 0:
            raise ValueError(f"p={p} makes the V dissipation prefactor nonpositive")
        return p

    @model_validator(mode="after")
    def _box_holds_domain(self) -> RunConfig:
        if self.lp.L < 2.0 * max(self.grid.Rmax, self.grid.Lz):
            raise ValueError(f"lp.L={self.lp.L} must be at least 2 max(Rmax, Lz) = {2.0 * max(self.grid.Rmax, self.grid.Lz)}")
        return self


_TOP_LEVEL = ("name", "p", "c0", "formulation", "seed")


def _format_value(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(cfg: RunConfig) -> str:
    """Canonical text: top-level keys, then each section in declaration order."""
    lines = [f"{key} = {_format_value(getattr(cfg, key))}" for key in _TOP_LEVEL]
    for section in SECTIONS:
        model = getattr(cfg, section)
        lines.append("")
        lines.extend(f"{section}.{key} = {_format_value(getattr(model, key))}" for key in type(model).model_fields)
    return "\n".join(lines) + "\n"


def _parse_value(raw: str) -> Any:
    return None if raw.lower() == "none" else raw


def _locate(loc: tuple[Any, ...], lines: dict[str, int]) -> tuple[int, str | None]:
    parts = [str(part) for part in loc if not isinstance(part, int)]
    while parts:
        key = ".".join(parts)
        if key in lines:
            return lines[key], key
        # a section-level validator reports the section; point at its first key
        for candidate, number in lines.items():
            if candidate.startswith(f"{key}."):
                return number, key
        parts.pop()
    return 0, None


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines; errors carry the 1-based line of the offending key."""
    data: dict[str, Any] = {}
    lines: dict[str, int] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got {raw_line.strip()!r}", line=number)
        if key in lines:
            raise ConfigError(f"duplicate key {key!r} (first set on line {lines[key]})", line=number, key=key)
        section, dot, field = key.partition(".")
        if dot and (section not in SECTIONS or not field or "." in field):
            raise ConfigError(f"unknown section key {key!r}", line=number, key=key)
        lines[key] = number
        if dot:
            data.setdefault(section, {})[field] = _parse_value(value)
        else:
            data[key] = _parse_value(value)
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        line, key = _locate(tuple(error["loc"]), lines)
        if not line:
            # model-level checks name the key in their message
            line, key = next(((n, k) for k, n in lines.items() if f"{k}=" in error["msg"]), (0, None))
        raise ConfigError(error["msg"], line=line, key=key) from None


def load_config(path: str | Path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))
