"""Time integration of the reduced, reformulated and three-component magnetic systems.

:mod:`swirlmhd.evolve.runner` is imported on demand; it depends on the harness configuration.
"""

from __future__ import annotations

from .full_b import full_b_dt_bound, step_full_b
from .initial import Amplitudes, BumpProfile, InitialData, calibrate_amplitudes, primitive_bump_state
from .primitive import current_consistency_gap, primitive_dt_bound, step_primitive
from .reform import reform_dt_bound, step_reform
from .state import (
    AxiState,
    FullBState,
    ReformState,
    Scheme,
    StepperConfig,
    VelocityField,
    primitive_from_reform,
    reform_from_primitive,
)

__all__ = [
    "Amplitudes",
    "AxiState",
    "BumpProfile",
    "FullBState",
    "InitialData",
    "ReformState",
    "Scheme",
    "StepperConfig",
    "VelocityField",
    "calibrate_amplitudes",
    "current_consistency_gap",
    "full_b_dt_bound",
    "primitive_bump_state",
    "primitive_dt_bound",
    "primitive_from_reform",
    "reform_dt_bound",
    "reform_from_primitive",
    "step_full_b",
    "step_primitive",
    "step_reform",
]
