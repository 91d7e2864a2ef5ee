"""Axisymmetric Biot-Savart: (u^r, u^z) from omega^theta through the swirl stream function."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft
from scipy.linalg import solve_banded

from .exceptions import ContractError
from .grid import FloatArray, Grid, Parity, ScalarField
from .operators import FaceFluxes, RadialStencil, curl_from_swirl, face_fluxes, swirl_stencil
from .utils import thread_count

__all__ = [
    "PoissonSolver",
    "RadialBandedSolver",
    "StreamSolution",
    "biot_savart",
    "diagnose_velocity",
    "implicit_solver",
    "poisson_solver",
    "solve_stream",
    "z_mode_eigenvalues",
]


def z_mode_eigenvalues(grid: Grid) -> FloatArray:
    """Symbols of the periodic second difference in z for the rfft modes 0..Nz//2."""
    m = np.arange(grid.Nz // 2 + 1)
    return -(4.0 / grid.dz**2) * np.sin(math.pi * m / grid.Nz) ** 2


class RadialBandedSolver:
    """Direct solver for ``(alpha I + beta (L_r + d_zz)) x = rhs`` on the whole grid.

    ``d_zz`` is diagonalized by an rfft in z; the resulting tridiagonal radial systems of
    every mode are stacked into one banded matrix with zero coupling between blocks, and the
    real and imaginary parts are solved as two right-hand sides.
    """

    __slots__ = ("_bands", "_modes", "alpha", "beta", "grid", "stencil")

    def __init__(self, grid: Grid, stencil: RadialStencil, *, alpha: float = 0.0, beta: float = 1.0) -> None:
        self.grid = grid
        self.stencil = stencil
        self.alpha = float(alpha)
        self.beta = float(beta)
        eigenvalues = z_mode_eigenvalues(grid)
        self._modes = eigenvalues.size
        bands = np.tile(self.beta * stencil.bands(), (1, self._modes))
        bands[1] += self.alpha + self.beta * np.repeat(eigenvalues, grid.Nr)
        self._bands = bands

    def solve(self, rhs: FloatArray) -> FloatArray:
        rhs = np.asarray(rhs, dtype=np.float64)
        if rhs.shape != self.grid.shape:
            raise ContractError(f"right-hand side has shape {rhs.shape}, grid expects {self.grid.shape}")
        if not np.isfinite(rhs).all():
            raise ContractError("banded solve received a non-finite right-hand side")
        workers = thread_count()
        spectrum = fft.rfft(rhs, axis=1, workers=workers)
        stacked = spectrum.T.reshape(-1)
        columns = np.column_stack([stacked.real, stacked.imag])
        solution = solve_banded((1, 1), self._bands, columns, check_finite=False)
        modes = (solution[:, 0] + 1j * solution[:, 1]).reshape(self._modes, self.grid.Nr).T
        return fft.irfft(modes, n=self.grid.Nz, axis=1, workers=workers)

    def solve_field(self, rhs: ScalarField, name: str | None = None) -> ScalarField:
        return rhs.with_values(self.solve(rhs.values), name)


class PoissonSolver:
    """Solves (Delta - 1/r^2) phi = -omega with phi = 0 at Rmax; reusable and read-only after construction."""

    __slots__ = ("_solver", "grid")

    def __init__(self, grid: Grid) -> None:
        self.grid = grid
        self._solver = RadialBandedSolver(grid, swirl_stencil(grid))

    def solve(self, omega_theta: ScalarField) -> ScalarField:
        if omega_theta.parity is not Parity.ODD:
            raise ContractError.parity("solve_stream", Parity.ODD.value, omega_theta.parity.value)
        if omega_theta.grid != self.grid:
            raise ContractError.grid_mismatch("solve_stream")
        values = self._solver.solve(-omega_theta.values)
        return ScalarField(self.grid, values, Parity.ODD, "phi")


@lru_cache(maxsize=16)
def poisson_solver(grid: Grid) -> PoissonSolver:
    return PoissonSolver(grid)


def solve_stream(omega_theta: ScalarField) -> ScalarField:
    return poisson_solver(omega_theta.grid).solve(omega_theta)


def biot_savart(omega_theta: ScalarField) -> tuple[ScalarField, ScalarField]:
    """(u^r, u^z) = (-d_z phi, d_r phi + phi/r) with phi from :func:`solve_stream`."""
    u_r, u_z = curl_from_swirl(solve_stream(omega_theta))
    return u_r.renamed("u_r"), u_z.renamed("u_z")


@dataclass(frozen=True, slots=True, eq=False)
class StreamSolution:
    """Everything the transport step needs from one elliptic solve."""

    phi: ScalarField
    u_r: ScalarField
    u_z: ScalarField
    fluxes: FaceFluxes


def diagnose_velocity(omega_theta: ScalarField) -> StreamSolution:
    phi = solve_stream(omega_theta)
    u_r, u_z = curl_from_swirl(phi)
    return StreamSolution(phi, u_r.renamed("u_r"), u_z.renamed("u_z"), face_fluxes(phi))


@lru_cache(maxsize=64)
def implicit_solver(grid: Grid, stencil: RadialStencil, dt: float) -> RadialBandedSolver:
    """Backward-Euler solver ``(I - dt L) x = rhs`` for the operator with radial part ``stencil``."""
    return RadialBandedSolver(grid, stencil, alpha=1.0, beta=-float(dt))
