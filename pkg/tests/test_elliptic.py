from __future__ import annotations

import numpy as np
import pytest

from swirlmhd.elliptic import (
    biot_savart,
    diagnose_velocity,
    implicit_solver,
    poisson_solver,
    solve_stream,
    z_mode_eigenvalues,
)
from swirlmhd.exceptions import ContractError
from swirlmhd.grid import Grid, Parity
from swirlmhd.operators import laplacian_swirl, reform_stencil, second_difference_z


def test_stream_solves_the_discrete_poisson_problem(random_odd) -> None:
    omega = random_odd()
    phi = solve_stream(omega)
    residual = laplacian_swirl(phi).values + omega.values
    assert np.max(np.abs(residual)) <= 1e-10 * omega.max_abs()


def test_zero_vorticity_gives_zero_velocity(grid: Grid) -> None:
    u_r, u_z = biot_savart(grid.zeros(Parity.ODD))
    assert u_r.max_abs() == 0.0
    assert u_z.max_abs() == 0.0
    assert u_r.parity is Parity.ODD
    assert u_z.parity is Parity.EVEN


def test_solver_contracts(grid: Grid) -> None:
    with pytest.raises(ContractError):
        solve_stream(grid.zeros(Parity.EVEN))
    with pytest.raises(ContractError):
        poisson_solver(grid).solve(grid.refined().zeros(Parity.ODD))


def test_solver_is_cached_per_grid(grid: Grid) -> None:
    assert poisson_solver(grid) is poisson_solver(Grid(Nr=32, Nz=32, Rmax=4.0, Lz=8.0))


def test_mode_eigenvalues(grid: Grid) -> None:
    eigenvalues = z_mode_eigenvalues(grid)
    assert eigenvalues.shape == (grid.Nz // 2 + 1,)
    assert eigenvalues[0] == 0.0
    assert np.all(eigenvalues[1:] < 0.0)
    assert eigenvalues[-1] == pytest.approx(-4.0 / grid.dz**2)


def test_implicit_solver_inverts_backward_euler(grid: Grid, rng: np.random.Generator) -> None:
    dt = 0.01
    stencil = reform_stencil(grid, 2.0)
    x = rng.standard_normal(grid.shape)
    rhs = x - dt * (stencil.apply(x) + second_difference_z(x, grid.dz))
    np.testing.assert_allclose(implicit_solver(grid, stencil, dt).solve(rhs), x, atol=1e-11)


def test_non_finite_right_hand_side_is_rejected(grid: Grid) -> None:
    rhs = np.zeros(grid.shape)
    rhs[3, 4] = np.nan
    with pytest.raises(ContractError):
        implicit_solver(grid, reform_stencil(grid, 2.0), 0.01).solve(rhs)


def test_diagnosed_fluxes_match_stream(bump_state) -> None:
    solution = diagnose_velocity(bump_state.omega_theta)
    np.testing.assert_array_equal(solution.u_r.values, bump_state.u_r.values)
    assert solution.u_r.name == "u_r"
    assert np.max(np.abs(solution.fluxes.net_outflow())) <= 1e-12 * np.max(np.abs(solution.fluxes.radial))
