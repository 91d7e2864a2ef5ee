"""One step of the reformulated system in (B, eta, V)."""

from __future__ import annotations

import numpy as np

from ..elliptic import implicit_solver
from ..exceptions import StabilityError
from ..grid import FloatArray, Parity, ScalarField
from ..operators import OperatorWorkspace, advect, advection_dt_bound, d_dz, laplacian_reform, reform_stencil
from .state import (
    ReformState,
    Scheme,
    StepperConfig,
    explicit_diffusion_bound,
    rate_limit,
    resolved_dt,
)

__all__ = ["reform_dt_bound", "step_reform", "v_drift_coefficient"]

_BOUND_SLACK = 1e-12


def v_drift_coefficient(epsilon: float) -> float:
    """The coefficient a = 2(1 - epsilon) of the V operator Delta + (a/r) d_r."""
    return 2.0 * (1.0 - epsilon)


def reform_dt_bound(state: ReformState, scheme: Scheme = Scheme.IMEX_EULER) -> float:
    grid = state.grid
    eps = state.epsilon
    r = grid.r_column
    zeroth = (2.0 * eps - eps * eps) / r**2 + (2.0 - eps) * np.abs(state.u_r.values / r)
    bound = min(advection_dt_bound(state.fluxes), rate_limit(float(np.max(zeroth))))
    if scheme is Scheme.EXPLICIT_RK2:
        stencils = (reform_stencil(grid, 2.0), reform_stencil(grid, v_drift_coefficient(eps)))
        bound = min(bound, explicit_diffusion_bound(grid, stencils))
    return bound


def _transport_rates(state: ReformState, v_damping_sign: float) -> tuple[FloatArray, FloatArray, FloatArray]:
    eps = state.epsilon
    r = state.grid.r_column
    u_r, u_z, flux = state.u_r, state.u_z, state.fluxes
    B, eta, V = state.B, state.eta, state.V
    scratch = OperatorWorkspace(state.grid)
    B_rate = -advect(u_r, u_z, B, flux, workspace=scratch).values
    eta_rate = (
        -advect(u_r, u_z, eta, flux, workspace=scratch).values
        + 2.0 * V.values * d_dz(V).values / r ** (2.0 * eps)
        - 2.0 * B.values * d_dz(B).values
    )
    V_rate = (
        -advect(u_r, u_z, V, flux, workspace=scratch).values
        - (2.0 - eps) * (u_r.values / r) * V.values
        - v_damping_sign * (2.0 * eps - eps * eps) * V.values / r**2
    )
    return B_rate, eta_rate, V_rate


def _diffusion_rates(state: ReformState) -> tuple[FloatArray, FloatArray, FloatArray]:
    return (
        laplacian_reform(state.B, 2.0).values,
        laplacian_reform(state.eta, 2.0).values,
        laplacian_reform(state.V, v_drift_coefficient(state.epsilon)).values,
    )


def _assemble(state: ReformState, time: float, B: FloatArray, eta: FloatArray, V: FloatArray) -> ReformState:
    grid = state.grid
    return ReformState.from_fields(
        time,
        ScalarField(grid, B, Parity.EVEN, "B"),
        ScalarField(grid, eta, Parity.EVEN, "eta"),
        ScalarField(grid, V, Parity.EVEN, "V"),
        state.epsilon,
    )


def _imex_euler(state: ReformState, dt: float, v_damping_sign: float) -> ReformState:
    grid = state.grid
    B_rate, eta_rate, V_rate = _transport_rates(state, v_damping_sign)
    drift2 = implicit_solver(grid, reform_stencil(grid, 2.0), dt)
    drift_v = implicit_solver(grid, reform_stencil(grid, v_drift_coefficient(state.epsilon)), dt)
    return _assemble(
        state,
        state.time + dt,
        drift2.solve(state.B.values + dt * B_rate),
        drift2.solve(state.eta.values + dt * eta_rate),
        drift_v.solve(state.V.values + dt * V_rate),
    )


def _heun(state: ReformState, dt: float, v_damping_sign: float) -> ReformState:
    def rates(s: ReformState) -> list[FloatArray]:
        return [t + d for t, d in zip(_transport_rates(s, v_damping_sign), _diffusion_rates(s), strict=True)]

    start = (state.B.values, state.eta.values, state.V.values)
    first = rates(state)
    predictor = _assemble(state, state.time + dt, *(x + dt * k for x, k in zip(start, first, strict=True)))
    second = rates(predictor)
    return _assemble(
        state,
        state.time + dt,
        *(x + 0.5 * dt * (k1 + k2) for x, k1, k2 in zip(start, first, second, strict=True)),
    )


def step_reform(state: ReformState, cfg: StepperConfig, *, v_damping_sign: float = 1.0) -> ReformState:
    """Advance (B, eta, V) one step.

    ``v_damping_sign`` multiplies the (2 epsilon - epsilon^2) V / r^2 term; +1 is the physical
    system, -1 the sign-flipped variant that the formulation-equivalence check must reject.
    """
    dt = resolved_dt(cfg)
    bound = reform_dt_bound(state, cfg.scheme)
    if dt > bound * (1.0 + _BOUND_SLACK):
        raise StabilityError(dt, bound, state.time)
    if cfg.scheme is Scheme.EXPLICIT_RK2:
        return _heun(state, dt, v_damping_sign)
    return _imex_euler(state, dt, v_damping_sign)
