from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from swirlmhd.evolve.full_b import step_full_b
from swirlmhd.evolve.initial import (
    Amplitudes,
    BumpProfile,
    bump,
    calibrate_amplitudes,
    initial_norms,
    primitive_bump_state,
)
from swirlmhd.evolve.primitive import current_consistency_gap, primitive_dt_bound, step_primitive
from swirlmhd.evolve.reform import reform_dt_bound, step_reform, v_drift_coefficient
from swirlmhd.evolve.state import (
    AxiState,
    FullBState,
    ReformState,
    Scheme,
    StepperConfig,
    VelocityField,
    primitive_from_reform,
    reform_from_primitive,
    relative_gap,
    resolved_dt,
)
from swirlmhd.exceptions import BlowUpError, ContractError, DomainError, StabilityError
from swirlmhd.exponents import check_smallness
from swirlmhd.grid import Grid, Parity, ScalarField, lp_norm


def test_bump_profile() -> None:
    np.testing.assert_array_equal(bump(np.array([0.0, 1.0, -1.5])), [1.0, 0.0, 0.0])


def test_profile_must_fit_the_domain(grid: Grid) -> None:
    with pytest.raises(DomainError):
        BumpProfile.from_fractions(grid, height_fraction=0.5, center_fraction=0.4)
    with pytest.raises(DomainError):
        BumpProfile(radius=5.0, half_height=1.0, center=4.0).check_inside(grid)


def test_stepper_config_is_strict() -> None:
    with pytest.raises(ValidationError):
        StepperConfig(dt=0.0)
    with pytest.raises(ValidationError):
        StepperConfig(substeps=2)
    with pytest.raises(ContractError):
        resolved_dt(StepperConfig())


def test_states_check_parity_and_finiteness(grid: Grid) -> None:
    odd, even = grid.zeros(Parity.ODD), grid.zeros(Parity.EVEN)
    with pytest.raises(ContractError):
        AxiState.from_fields(0.0, even, odd, odd)
    bad = ScalarField(grid, np.full(grid.shape, np.inf), Parity.ODD, "u_theta")
    with pytest.raises(BlowUpError):
        AxiState.from_fields(0.0, bad, odd, odd)
    with pytest.raises(ContractError):
        ReformState.from_fields(0.0, even, even, even, 1.5)
    with pytest.raises(ContractError):
        FullBState(0.0, even, odd, even)


def test_views_convert_back_and_forth(bump_state, exps) -> None:
    eps = float(exps.epsilon)
    rebuilt = primitive_from_reform(reform_from_primitive(bump_state, eps))
    for name in ("u_theta", "b_theta", "omega_theta"):
        assert relative_gap(getattr(bump_state, name), getattr(rebuilt, name)) < 1e-12


def test_relative_gap_edge_cases(grid: Grid) -> None:
    zero = grid.zeros(Parity.ODD)
    one = grid.sample(lambda r, z: r + 0.0 * z, Parity.ODD)
    assert relative_gap(zero, zero) == 0.0
    assert relative_gap(zero, one) == math.inf
    assert relative_gap(one, one.scaled(0.5)) == pytest.approx(0.5)


def test_zero_state_is_a_fixed_point(grid: Grid) -> None:
    state = AxiState.zero(grid)
    assert primitive_dt_bound(state) == math.inf
    stepped = step_primitive(state, StepperConfig(dt=0.1))
    assert stepped.time == pytest.approx(0.1)
    assert stepped.u_theta.max_abs() == 0.0
    assert stepped.omega_theta.max_abs() == 0.0


def test_oversized_step_is_refused(grid: Grid) -> None:
    strong = primitive_bump_state(grid, BumpProfile.from_fractions(grid), Amplitudes(omega=1e4))
    with pytest.raises(StabilityError):
        step_primitive(strong, StepperConfig(dt=1.0))


@pytest.mark.parametrize("scheme", [Scheme.IMEX_EULER, Scheme.EXPLICIT_RK2])
def test_primitive_swirl_circulation_obeys_max_principle(bump_state, scheme: Scheme) -> None:
    dt = 0.5 * primitive_dt_bound(bump_state, scheme)
    state = bump_state
    peak = lp_norm(state.u_theta, math.inf, 1.0)
    for _ in range(5):
        state = step_primitive(state, StepperConfig(dt=dt, scheme=scheme))
        if scheme is Scheme.IMEX_EULER:
            assert lp_norm(state.u_theta, math.inf, 1.0) <= peak * (1.0 + 1e-12)
    assert state.u_theta.is_finite()


def test_current_consistency_is_small(bump_state) -> None:
    assert current_consistency_gap(bump_state, 1e-3) < 0.1


def test_reform_magnetic_norm_decays(grid: Grid, exps) -> None:
    eps = float(exps.epsilon)
    state = reform_from_primitive(primitive_bump_state(grid, BumpProfile.from_fractions(grid), Amplitudes(b=1.0)), eps)
    cfg = StepperConfig(dt=0.5 * reform_dt_bound(state))
    norm = lp_norm(state.B, 2.0)
    for _ in range(5):
        state = step_reform(state, cfg)
        assert lp_norm(state.B, 2.0) <= norm
        norm = lp_norm(state.B, 2.0)


def test_flipped_damping_sign_changes_V(bump_state, exps) -> None:
    state = reform_from_primitive(bump_state, float(exps.epsilon))
    cfg = StepperConfig(dt=0.5 * reform_dt_bound(state))
    physical = step_reform(state, cfg)
    flipped = step_reform(state, cfg, v_damping_sign=-1.0)
    assert relative_gap(physical.V, flipped.V) > 0.0
    np.testing.assert_array_equal(physical.B.values, flipped.B.values)


def test_v_drift_coefficient() -> None:
    assert v_drift_coefficient(1.0 / 7.0) == pytest.approx(12.0 / 7.0)


def test_full_b_keeps_pure_swirl_exactly(bump_state) -> None:
    state = FullBState.pure_swirl(bump_state.b_theta)
    cfg = StepperConfig(dt=1e-3)
    for _ in range(10):
        state = step_full_b(state, bump_state.velocity(), cfg)
    assert state.structure_residual() == 0.0
    assert state.b_theta.max_abs() > 0.0


def test_full_b_rejects_foreign_velocity(bump_state) -> None:
    state = FullBState.pure_swirl(bump_state.b_theta)
    with pytest.raises(ContractError):
        step_full_b(state, VelocityField.zero(bump_state.grid.refined()), StepperConfig(dt=1e-3))


def test_calibrated_amplitudes_sit_at_the_margin(grid: Grid, exps) -> None:
    profile = BumpProfile.from_fractions(grid)
    amplitudes = calibrate_amplitudes(grid, profile, exps, 1e-3, omega_amplitude=0.01, margin=0.5)
    state = primitive_bump_state(grid, profile, amplitudes)
    norms = initial_norms(state, reform_from_primitive(state, float(exps.epsilon)), exps)
    report = check_smallness(Fraction(51, 50), 1e-3, norms)
    assert report.passed
    assert report.margins[0] == pytest.approx(2.0, rel=1e-3)
    assert report.margins[1] == pytest.approx(2.0, rel=1e-3)
    with pytest.raises(DomainError):
        calibrate_amplitudes(grid, profile, exps, 1e-3, omega_amplitude=0.01, margin=1.5)
