"""Axisymmetric pure-swirl MHD: discretization, time stepping, diagnostics and verification suites."""

from __future__ import annotations

from .evolve.runner import RunResult, run
from .exceptions import (
    BlowUpError,
    ConfigError,
    ContractError,
    DomainError,
    StabilityError,
    SwirlMHDError,
    VerificationFailure,
)
from .exponents import ExponentSet, exponent_set
from .grid import Grid, Parity, ScalarField
from .harness.config import RunConfig, dump_config, load_config, parse_config

__all__ = [
    "BlowUpError",
    "ConfigError",
    "ContractError",
    "DomainError",
    "ExponentSet",
    "Grid",
    "Parity",
    "RunConfig",
    "RunResult",
    "ScalarField",
    "StabilityError",
    "SwirlMHDError",
    "VerificationFailure",
    "dump_config",
    "exponent_set",
    "load_config",
    "parse_config",
    "run",
]
