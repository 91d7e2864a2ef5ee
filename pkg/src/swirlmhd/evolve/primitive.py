"""One step of the primitive reduced system (u^theta, b^theta, omega^theta).

The swirl velocity is carried as Gamma = r u^theta, which is transported and diffused with
no zeroth-order source, so ``max |r u^theta|`` cannot grow under the limited upwind transport
followed by the monotone implicit diffusion.
"""

from __future__ import annotations

import numpy as np

from ..elliptic import implicit_solver
from ..exceptions import StabilityError
from ..grid import FloatArray, Parity, ScalarField, central_gradient, fill_ghosts
from ..operators import (
    OperatorWorkspace,
    advect,
    advection_dt_bound,
    curl_from_swirl,
    d_dz,
    gamma_stencil,
    laplacian_gamma,
    laplacian_swirl,
    reform_stencil,
    swirl_stencil,
)
from .state import (
    AxiState,
    Scheme,
    StepperConfig,
    explicit_diffusion_bound,
    rate_limit,
    resolved_dt,
)

__all__ = ["current_consistency_gap", "primitive_dt_bound", "step_primitive"]

_BOUND_SLACK = 1e-12


def primitive_dt_bound(state: AxiState, scheme: Scheme = Scheme.IMEX_EULER) -> float:
    grid = state.grid
    hoop = float(np.max(np.abs(state.u_r.values / grid.r_column)))
    bound = min(advection_dt_bound(state.fluxes), rate_limit(hoop))
    if scheme is Scheme.EXPLICIT_RK2:
        bound = min(bound, explicit_diffusion_bound(grid, (swirl_stencil(grid), gamma_stencil(grid))))
    return bound


def _transport_rates(state: AxiState) -> tuple[FloatArray, FloatArray, FloatArray]:
    r = state.grid.r_column
    u_r, u_z, flux = state.u_r, state.u_z, state.fluxes
    u, b, omega = state.u_theta, state.b_theta, state.omega_theta
    hoop = u_r.values / r
    scratch = OperatorWorkspace(state.grid)
    gamma_rate = -advect(u_r, u_z, state.gamma, flux, workspace=scratch).values
    b_rate = -advect(u_r, u_z, b, flux, workspace=scratch).values + hoop * b.values
    omega_rate = (
        -advect(u_r, u_z, omega, flux, workspace=scratch).values
        + 2.0 * u.values * d_dz(u).values / r
        - 2.0 * b.values * d_dz(b).values / r
        + hoop * omega.values
    )
    return gamma_rate, b_rate, omega_rate


def _diffusion_rates(state: AxiState) -> tuple[FloatArray, FloatArray, FloatArray]:
    return (
        laplacian_gamma(state.gamma).values,
        laplacian_swirl(state.b_theta).values,
        laplacian_swirl(state.omega_theta).values,
    )


def _assemble(state: AxiState, time: float, gamma: FloatArray, b: FloatArray, omega: FloatArray) -> AxiState:
    grid = state.grid
    return AxiState.from_fields(
        time,
        ScalarField(grid, gamma / grid.r_column, Parity.ODD, "u_theta"),
        ScalarField(grid, b, Parity.ODD, "b_theta"),
        ScalarField(grid, omega, Parity.ODD, "omega_theta"),
    )


def _imex_euler(state: AxiState, dt: float) -> AxiState:
    grid = state.grid
    gamma_rate, b_rate, omega_rate = _transport_rates(state)
    gamma = state.gamma.values + dt * gamma_rate
    b = state.b_theta.values + dt * b_rate
    omega = state.omega_theta.values + dt * omega_rate
    swirl = implicit_solver(grid, swirl_stencil(grid), dt)
    return _assemble(
        state,
        state.time + dt,
        implicit_solver(grid, gamma_stencil(grid), dt).solve(gamma),
        swirl.solve(b),
        swirl.solve(omega),
    )


def _heun(state: AxiState, dt: float) -> AxiState:
    def rates(s: AxiState) -> list[FloatArray]:
        return [t + d for t, d in zip(_transport_rates(s), _diffusion_rates(s), strict=True)]

    start = (state.gamma.values, state.b_theta.values, state.omega_theta.values)
    first = rates(state)
    predictor = _assemble(state, state.time + dt, *(x + dt * k for x, k in zip(start, first, strict=True)))
    second = rates(predictor)
    return _assemble(
        state,
        state.time + dt,
        *(x + 0.5 * dt * (k1 + k2) for x, k1, k2 in zip(start, first, second, strict=True)),
    )


def step_primitive(state: AxiState, cfg: StepperConfig) -> AxiState:
    """Advance one step; raises :class:`StabilityError` before stepping when dt exceeds the bound."""
    dt = resolved_dt(cfg)
    bound = primitive_dt_bound(state, cfg.scheme)
    if dt > bound * (1.0 + _BOUND_SLACK):
        raise StabilityError(dt, bound, state.time)
    if cfg.scheme is Scheme.EXPLICIT_RK2:
        return _heun(state, dt)
    return _imex_euler(state, dt)


def current_consistency_gap(state: AxiState, dt: float) -> float:
    """Relative L^2 gap between J stepped by its own evolution equations and the curl of the stepped b^theta.

    Both use one IMEX Euler step of size ``dt``; agreement is expected to O(h^2 + dt).
    """
    grid = state.grid
    r = grid.r_column
    u_r, u_z, flux = state.u_r, state.u_z, state.fluxes
    j_r, j_z = curl_from_swirl(state.b_theta)
    dr_ur, dz_ur = central_gradient(fill_ghosts(u_r), grid.dr, grid.dz)
    dr_uz, dz_uz = central_gradient(fill_ghosts(u_z), grid.dr, grid.dz)
    hoop = u_r.values / r
    b_over_r = state.b_theta.values / r
    rate_r = (
        -advect(u_r, u_z, j_r, flux).values
        + j_r.values * dr_ur
        + j_z.values * dz_ur
        + 2.0 * hoop * j_r.values
        - 2.0 * b_over_r * dz_ur
    )
    rate_z = (
        -advect(u_r, u_z, j_z, flux).values
        + j_r.values * dr_uz
        + j_z.values * dz_uz
        + 2.0 * hoop * j_z.values
        + 2.0 * b_over_r * (dr_ur - hoop)
    )
    evolved_r = implicit_solver(grid, swirl_stencil(grid), dt).solve(j_r.values + dt * rate_r)
    evolved_z = implicit_solver(grid, reform_stencil(grid, 0.0), dt).solve(j_z.values + dt * rate_z)
    stepped = step_primitive(state, StepperConfig(dt=dt))
    curl_r, curl_z = curl_from_swirl(stepped.b_theta)
    measure = grid.cell_measure
    gap = float(np.sum(((evolved_r - curl_r.values) ** 2 + (evolved_z - curl_z.values) ** 2) * measure))
    scale = float(np.sum((curl_r.values**2 + curl_z.values**2) * measure))
    if gap == 0.0:
        return 0.0
    return float(np.sqrt(gap / scale)) if scale > 0 else float("inf")
