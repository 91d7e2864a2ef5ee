"""The three-component induction system (b^r, b^theta, b^z) driven by a given velocity.

Only used to check that a pure-swirl magnetic field stays pure-swirl: when b^r = b^z = 0 the
right-hand sides of their equations vanish identically and the implicit solve maps 0 to 0.
"""

from __future__ import annotations

import numpy as np

from ..elliptic import implicit_solver
from ..exceptions import ContractError, StabilityError
from ..grid import FloatArray, Grid, Parity, ScalarField, central_gradient, fill_ghosts
from ..operators import (
    FaceFluxes,
    OperatorWorkspace,
    advect,
    advection_dt_bound,
    laplacian_reform,
    laplacian_swirl,
    reform_stencil,
    swirl_stencil,
    velocity_face_fluxes,
)
from .state import (
    FullBState,
    Scheme,
    StepperConfig,
    VelocityField,
    check_finite,
    explicit_diffusion_bound,
    rate_limit,
    resolved_dt,
)

__all__ = ["full_b_dt_bound", "step_full_b"]

_BOUND_SLACK = 1e-12


def _fluxes(u: VelocityField) -> FaceFluxes:
    return u.fluxes if u.fluxes is not None else velocity_face_fluxes(u.u_r, u.u_z)


def _gradients(u: VelocityField) -> dict[str, tuple[FloatArray, FloatArray]]:
    grid = u.u_r.grid
    return {
        name: central_gradient(fill_ghosts(f), grid.dr, grid.dz)
        for name, f in (("r", u.u_r), ("theta", u.u_theta), ("z", u.u_z))
    }


def full_b_dt_bound(u: VelocityField, scheme: Scheme = Scheme.IMEX_EULER) -> float:
    grid = u.u_r.grid
    coupling = np.abs(u.u_r.values / grid.r_column)
    for d_r, d_z in _gradients(u).values():
        coupling = coupling + np.abs(d_r) + np.abs(d_z)
    bound = min(advection_dt_bound(_fluxes(u)), rate_limit(float(np.max(coupling))))
    if scheme is Scheme.EXPLICIT_RK2:
        bound = min(bound, explicit_diffusion_bound(grid, (swirl_stencil(grid), reform_stencil(grid, 0.0))))
    return bound


def _transport_rates(state: FullBState, u: VelocityField, fluxes: FaceFluxes) -> tuple[FloatArray, ...]:
    grid = state.b_r.grid
    grads = _gradients(u)
    b_r, b_t, b_z = state.b_r.values, state.b_theta.values, state.b_z.values

    def stretch(component: str) -> FloatArray:
        d_r, d_z = grads[component]
        return b_r * d_r + b_z * d_z

    hoop = u.u_r.values / grid.r_column
    scratch = OperatorWorkspace(grid)
    return (
        -advect(u.u_r, u.u_z, state.b_r, fluxes, workspace=scratch).values + stretch("r"),
        -advect(u.u_r, u.u_z, state.b_theta, fluxes, workspace=scratch).values + stretch("theta") + hoop * b_t,
        -advect(u.u_r, u.u_z, state.b_z, fluxes, workspace=scratch).values + stretch("z"),
    )


def _assemble(time: float, grid: Grid, b_r: FloatArray, b_t: FloatArray, b_z: FloatArray) -> FullBState:
    fields = (
        ScalarField(grid, b_r, Parity.ODD, "b_r"),
        ScalarField(grid, b_t, Parity.ODD, "b_theta"),
        ScalarField(grid, b_z, Parity.EVEN, "b_z"),
    )
    check_finite(time, *fields)
    return FullBState(time, *fields)


def step_full_b(state: FullBState, u: VelocityField, cfg: StepperConfig) -> FullBState:
    """Advance the induction system one step with the same splitting as the reduced solvers."""
    grid = state.b_r.grid
    if u.u_r.grid != grid:
        raise ContractError.grid_mismatch("step_full_b")
    dt = resolved_dt(cfg)
    bound = full_b_dt_bound(u, cfg.scheme)
    if dt > bound * (1.0 + _BOUND_SLACK):
        raise StabilityError(dt, bound, state.time)
    fluxes = _fluxes(u)
    start = (state.b_r.values, state.b_theta.values, state.b_z.values)
    time = state.time + dt
    if cfg.scheme is Scheme.EXPLICIT_RK2:

        def rates(s: FullBState) -> list[FloatArray]:
            diffusion = (
                laplacian_swirl(s.b_r).values,
                laplacian_swirl(s.b_theta).values,
                laplacian_reform(s.b_z, 0.0).values,
            )
            return [t + d for t, d in zip(_transport_rates(s, u, fluxes), diffusion, strict=True)]

        first = rates(state)
        predictor = _assemble(time, grid, *(x + dt * k for x, k in zip(start, first, strict=True)))
        second = rates(predictor)
        return _assemble(time, grid, *(x + 0.5 * dt * (k1 + k2) for x, k1, k2 in zip(start, first, second, strict=True)))

    transport = _transport_rates(state, u, fluxes)
    swirl = implicit_solver(grid, swirl_stencil(grid), dt)
    axial = implicit_solver(grid, reform_stencil(grid, 0.0), dt)
    explicit = [x + dt * k for x, k in zip(start, transport, strict=True)]
    return _assemble(time, grid, swirl.solve(explicit[0]), swirl.solve(explicit[1]), axial.solve(explicit[2]))
