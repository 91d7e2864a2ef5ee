"""Second-order cylindrical finite-difference operators on the cell-centred grid.

Radial parts of the Laplacian-type operators are stored as tridiagonal
:class:`RadialStencil` objects so that the explicit application here and the implicit
solves in :mod:`swirlmhd.elliptic` use the very same matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exceptions import ContractError
from .grid import FloatArray, Grid, Parity, ScalarField, central_gradient, fill_ghosts, refill_ghosts

__all__ = [
    "FaceFluxes",
    "OperatorWorkspace",
    "RadialStencil",
    "advect",
    "advection_dt_bound",
    "cartesian_gradient_magnitude",
    "curl_from_swirl",
    "curl_theta",
    "d_dr",
    "d_dz",
    "div_weighted_residual",
    "face_fluxes",
    "gamma_stencil",
    "laplacian_gamma",
    "laplacian_reform",
    "laplacian_swirl",
    "minmod",
    "pointwise_gradient_bound_check",
    "reform_stencil",
    "second_difference_z",
    "swirl_stencil",
    "velocity_face_fluxes",
]


@dataclass(frozen=True, slots=True, eq=False)
class RadialStencil:
    """Row i reads ``lower[i] f[i-1] + diag[i] f[i] + upper[i] f[i+1]``; boundary closures live in ``diag``."""

    lower: FloatArray
    diag: FloatArray
    upper: FloatArray

    def apply(self, values: FloatArray) -> FloatArray:
        out = self.diag[:, None] * values
        out[:-1] += self.upper[:-1, None] * values[1:]
        out[1:] += self.lower[1:, None] * values[:-1]
        return out

    def bands(self) -> FloatArray:
        """``(3, Nr)`` layout expected by ``scipy.linalg.solve_banded((1, 1), ...)``."""
        n = self.diag.size
        ab = np.zeros((3, n))
        ab[0, 1:] = self.upper[:-1]
        ab[1] = self.diag
        ab[2, :-1] = self.lower[1:]
        return ab

    def gershgorin_radius(self) -> float:
        return float(np.max(np.abs(self.diag) + np.abs(self.lower) + np.abs(self.upper)))


@lru_cache(maxsize=64)
def swirl_stencil(grid: Grid) -> RadialStencil:
    """Radial part of (Delta - 1/r^2) on odd fields, in flux form d_r[(1/r) d_r(r f)].

    The axis flux (1/r) d_r(r f) at r = 0 equals 2 f'(0). It is closed with (21 f_0 + f_1) / (6 h),
    which carries the same O(h^2) term as the central flux at r = h, so the axis row is exact on
    r and r^3. The outer face is a Dirichlet flux through f(Rmax) = 0. Rows 1..Nr-1 are
    symmetric for the weight r.
    """
    n, h = grid.Nr, grid.dr
    r, faces = grid.r_centers, grid.r_faces
    lower, upper = np.zeros(n), np.zeros(n)
    upper[:-1] = r[1:] / (h * h * faces[1:-1])
    upper[0] -= 1.0 / (6.0 * h * h)
    lower[1:] = r[:-1] / (h * h * faces[1:-1])
    outward, inward = np.zeros(n), np.zeros(n)
    outward[:-1] = r[:-1] / (h * h * faces[1:-1])
    outward[-1] = 2.0 * r[-1] / (h * h * faces[-1])
    inward[1:] = r[1:] / (h * h * faces[1:-1])
    inward[0] = 3.5 / (h * h)
    return RadialStencil(lower, -(outward + inward), upper)


@lru_cache(maxsize=64)
def reform_stencil(grid: Grid, a: float) -> RadialStencil:
    """Radial part of (Delta + (a/r) d_r) on even fields, i.e. r^{-k} d_r(r^k d_r) with k = 1 + a."""
    if not a > -1.0:
        raise ContractError(f"reform stencil needs a > -1, got {a}")
    n, h = grid.Nr, grid.dr
    k = 1.0 + a
    faces = grid.r_faces
    volume = (faces[1:] ** (k + 1) - faces[:-1] ** (k + 1)) / ((k + 1) * h)
    weight = faces**k
    lower, upper = np.zeros(n), np.zeros(n)
    upper[:-1] = weight[1:-1] / (h * h * volume[:-1])
    lower[1:] = weight[1:-1] / (h * h * volume[1:])
    outward = upper.copy()
    outward[-1] = 2.0 * weight[-1] / (h * h * volume[-1])
    return RadialStencil(lower, -(outward + lower), upper)


@lru_cache(maxsize=64)
def gamma_stencil(grid: Grid) -> RadialStencil:
    """Radial part of (Delta - (2/r) d_r) = r d_r((1/r) d_r) acting on Gamma = r u^theta.

    Off-diagonals are nonnegative and row sums nonpositive, so backward Euler with this
    operator cannot create new extrema.
    """
    n, h = grid.Nr, grid.dr
    r, faces = grid.r_centers, grid.r_faces
    lower, upper = np.zeros(n), np.zeros(n)
    upper[:-1] = r[:-1] / (h * h * faces[1:-1])
    lower[1:] = r[1:] / (h * h * faces[1:-1])
    outward = upper.copy()
    outward[-1] = 2.0 * r[-1] / (h * h * faces[-1])
    inward = lower.copy()
    inward[0] = 2.0 / (r[0] * h)
    return RadialStencil(lower, -(outward + inward), upper)


def second_difference_z(values: FloatArray, dz: float) -> FloatArray:
    return (np.roll(values, -1, axis=1) - 2.0 * values + np.roll(values, 1, axis=1)) / (dz * dz)


def _require(f: ScalarField, parity: Parity, operation: str) -> None:
    if f.parity is not parity:
        raise ContractError.parity(operation, parity.value, f.parity.value)


def _same_grid(operation: str, *fields: ScalarField) -> Grid:
    grid = fields[0].grid
    for other in fields[1:]:
        if other.grid != grid:
            raise ContractError.grid_mismatch(operation)
    return grid


class OperatorWorkspace:
    """Ghost-padded scratch buffers for one grid, reused across operator calls.

    Buffers are overwritten on every call and no result aliases them. One caller at a time.
    """

    __slots__ = ("_buffers", "grid")

    def __init__(self, grid: Grid) -> None:
        self.grid = grid
        self._buffers: dict[int, FloatArray] = {}

    def padded(self, f: ScalarField, width: int = 1) -> FloatArray:
        if f.grid != self.grid:
            raise ContractError.grid_mismatch("OperatorWorkspace.padded")
        buffer = self._buffers.get(width)
        if buffer is None:
            buffer = np.zeros((self.grid.Nr + 2 * width, self.grid.Nz + 2 * width))
            self._buffers[width] = buffer
        buffer[width:-width, width:-width] = f.values
        return refill_ghosts(buffer, f.parity, width)


def _ghosted(f: ScalarField, width: int = 1, workspace: OperatorWorkspace | None = None) -> FloatArray:
    return fill_ghosts(f, width) if workspace is None else workspace.padded(f, width)


def laplacian_swirl(f: ScalarField) -> ScalarField:
    """(Delta - 1/r^2) f for an odd (swirl) component."""
    _require(f, Parity.ODD, "laplacian_swirl")
    out = swirl_stencil(f.grid).apply(f.values) + second_difference_z(f.values, f.grid.dz)
    return f.with_values(out)


def laplacian_reform(f: ScalarField, a: float = 2.0) -> ScalarField:
    """(Delta + (a/r) d_r) f for an even field; a = 0 gives the plain Laplacian."""
    _require(f, Parity.EVEN, "laplacian_reform")
    out = reform_stencil(f.grid, float(a)).apply(f.values) + second_difference_z(f.values, f.grid.dz)
    return f.with_values(out)


def laplacian_gamma(f: ScalarField) -> ScalarField:
    """(Delta - (2/r) d_r) f for Gamma = r u^theta (even)."""
    _require(f, Parity.EVEN, "laplacian_gamma")
    out = gamma_stencil(f.grid).apply(f.values) + second_difference_z(f.values, f.grid.dz)
    return f.with_values(out)


def d_dr(f: ScalarField, workspace: OperatorWorkspace | None = None) -> ScalarField:
    d_r, _ = central_gradient(_ghosted(f, workspace=workspace), f.grid.dr, f.grid.dz)
    return ScalarField(f.grid, d_r, f.parity.flipped(), f.name)


def d_dz(f: ScalarField) -> ScalarField:
    values = (np.roll(f.values, -1, axis=1) - np.roll(f.values, 1, axis=1)) / (2.0 * f.grid.dz)
    return f.with_values(values)


def minmod(a: FloatArray, b: FloatArray) -> FloatArray:
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


@dataclass(frozen=True, slots=True, eq=False)
class FaceFluxes:
    """Volume fluxes (per radian) through cell faces.

    ``radial[I, j]`` crosses the face r = I dr of z-cell j in the +r direction, I = 0..Nr.
    ``axial[i, j]`` crosses the upper face z = (j + 1) dz of cell (i, j) in the +z direction.
    """

    grid: Grid
    radial: FloatArray
    axial: FloatArray

    @property
    def volumes(self) -> FloatArray:
        return self.grid.r_column * self.grid.dr * self.grid.dz

    def net_outflow(self) -> FloatArray:
        return self.radial[1:] - self.radial[:-1] + self.axial - np.roll(self.axial, 1, axis=1)

    def inflow(self) -> FloatArray:
        lower_axial = np.roll(self.axial, 1, axis=1)
        return (
            np.maximum(self.radial[:-1], 0.0)
            + np.maximum(-self.radial[1:], 0.0)
            + np.maximum(lower_axial, 0.0)
            + np.maximum(-self.axial, 0.0)
        )


def face_fluxes(stream: ScalarField) -> FaceFluxes:
    """Exactly divergence-free fluxes from the Stokes stream function r*phi sampled at cell corners."""
    _require(stream, Parity.ODD, "face_fluxes")
    grid = stream.grid
    psi = stream.values * grid.r_column
    psi_upper = 0.5 * (psi + np.roll(psi, -1, axis=1))
    corners = np.zeros((grid.Nr + 1, grid.Nz))
    corners[1:-1] = 0.5 * (psi_upper[:-1] + psi_upper[1:])
    radial = -(corners - np.roll(corners, 1, axis=1))
    axial = corners[1:] - corners[:-1]
    return FaceFluxes(grid, radial, axial)


def velocity_face_fluxes(u_r: ScalarField, u_z: ScalarField) -> FaceFluxes:
    grid = u_r.grid
    radial = np.zeros((grid.Nr + 1, grid.Nz))
    radial[1:-1] = grid.r_faces[1:-1, None] * grid.dz * 0.5 * (u_r.values[:-1] + u_r.values[1:])
    axial = grid.r_column * grid.dr * 0.5 * (u_z.values + np.roll(u_z.values, -1, axis=1))
    return FaceFluxes(grid, radial, axial)


def advection_dt_bound(fluxes: FaceFluxes) -> float:
    """Largest dt for which the limited upwind update is a convex combination of neighbours."""
    rate = float(np.max(fluxes.inflow() / fluxes.volumes))
    return math.inf if rate == 0.0 else 1.0 / (1.5 * rate)


def advect(
    u_r: ScalarField,
    u_z: ScalarField,
    f: ScalarField,
    flux: FaceFluxes | None = None,
    *,
    workspace: OperatorWorkspace | None = None,
) -> ScalarField:
    """+(u^r d_r + u^z d_z) f with minmod-limited upwinding.

    With ``flux`` (from :func:`face_fluxes`) the face fluxes are exactly divergence free and the
    forward-Euler update obeys a local maximum principle under :func:`advection_dt_bound`.
    Without it the fluxes are interpolated from the cell-centred velocity. A ``workspace`` on the
    same grid supplies the padded scratch array.
    """
    grid = _same_grid("advect", u_r, u_z, f)
    fluxes = flux if flux is not None else velocity_face_fluxes(u_r, u_z)
    if fluxes.grid != grid:
        raise ContractError.grid_mismatch("advect")

    padded = _ghosted(f, 2, workspace)
    core = f.values

    # radial reconstruction on cells -1..Nr, faces 0..Nr
    column = padded[:, 2:-2]
    forward = column[1:] - column[:-1]
    slope_r = minmod(forward[1:], forward[:-1])
    cells = column[1:-1]
    left_state = cells[:-1] + 0.5 * slope_r[:-1]
    right_state = cells[1:] - 0.5 * slope_r[1:]
    face_r = np.where(fluxes.radial >= 0.0, left_state, right_state)

    # axial reconstruction with periodic neighbours
    forward_z = np.roll(core, -1, axis=1) - core
    slope_z = minmod(forward_z, np.roll(forward_z, 1, axis=1))
    upper_left = core + 0.5 * slope_z
    upper_right = np.roll(core - 0.5 * slope_z, -1, axis=1)
    face_z = np.where(fluxes.axial >= 0.0, upper_left, upper_right)
    face_z_lower = np.roll(face_z, 1, axis=1)
    axial_lower = np.roll(fluxes.axial, 1, axis=1)

    total = (
        fluxes.radial[1:] * (face_r[1:] - core)
        - fluxes.radial[:-1] * (face_r[:-1] - core)
        + fluxes.axial * (face_z - core)
        - axial_lower * (face_z_lower - core)
    )
    return f.with_values(total / fluxes.volumes)


def curl_from_swirl(g: ScalarField) -> tuple[ScalarField, ScalarField]:
    """(-d_z g, d_r g + g/r): the poloidal curl of g e_theta (J from b^theta, omega from u^theta)."""
    _require(g, Parity.ODD, "curl_from_swirl")
    d_r, d_z = central_gradient(fill_ghosts(g), g.grid.dr, g.grid.dz)
    radial = ScalarField(g.grid, -d_z, Parity.ODD, f"curl_r({g.name})")
    axial = ScalarField(g.grid, d_r + g.values / g.grid.r_column, Parity.EVEN, f"curl_z({g.name})")
    return radial, axial


def curl_theta(u_r: ScalarField, u_z: ScalarField) -> ScalarField:
    """d_z u^r - d_r u^z, the azimuthal vorticity of a poloidal field."""
    grid = _same_grid("curl_theta", u_r, u_z)
    _require(u_r, Parity.ODD, "curl_theta")
    _require(u_z, Parity.EVEN, "curl_theta")
    _, dz_ur = central_gradient(fill_ghosts(u_r), grid.dr, grid.dz)
    dr_uz, _ = central_gradient(fill_ghosts(u_z), grid.dr, grid.dz)
    return ScalarField(grid, dz_ur - dr_uz, Parity.ODD, "omega_theta")


def div_weighted_residual(u_r: ScalarField, u_z: ScalarField) -> float:
    """||d_r(r u^r) + d_z(r u^z)|| in the unweighted grid L^2 norm."""
    grid = _same_grid("div_weighted_residual", u_r, u_z)
    r_padded = (np.arange(-1, grid.Nr + 1) + 0.5)[:, None] * grid.dr
    flux_r = fill_ghosts(u_r) * r_padded
    d_r, _ = central_gradient(flux_r, grid.dr, grid.dz)
    _, dz_uz = central_gradient(fill_ghosts(u_z), grid.dr, grid.dz)
    residual = d_r + grid.r_column * dz_uz
    return math.sqrt(float(np.sum(residual**2)) * grid.dr * grid.dz)


def _poloidal_gradients(u_r: ScalarField, u_z: ScalarField) -> tuple[FloatArray, ...]:
    grid = u_r.grid
    dr_ur, dz_ur = central_gradient(fill_ghosts(u_r), grid.dr, grid.dz)
    dr_uz, dz_uz = central_gradient(fill_ghosts(u_z), grid.dr, grid.dz)
    return dr_ur, dz_ur, dr_uz, dz_uz, u_r.values / grid.r_column


def cartesian_gradient_magnitude(u_r: ScalarField, u_z: ScalarField) -> FloatArray:
    """|grad(u^r e_r + u^z e_z)| including the hoop term u^r/r."""
    _same_grid("cartesian_gradient_magnitude", u_r, u_z)
    parts = _poloidal_gradients(u_r, u_z)
    return np.sqrt(sum(part**2 for part in parts))


def pointwise_gradient_bound_check(u_r: ScalarField, u_z: ScalarField) -> float:
    """max over cells of (|grad u^r| + |grad u^z| + |u^r/r|) / |grad u~|; at most sqrt(3)."""
    _same_grid("pointwise_gradient_bound_check", u_r, u_z)
    _require(u_r, Parity.ODD, "pointwise_gradient_bound_check")
    _require(u_z, Parity.EVEN, "pointwise_gradient_bound_check")
    dr_ur, dz_ur, dr_uz, dz_uz, hoop = _poloidal_gradients(u_r, u_z)
    lhs = np.hypot(dr_ur, dz_ur) + np.hypot(dr_uz, dz_uz) + np.abs(hoop)
    rhs = np.sqrt(dr_ur**2 + dz_ur**2 + dr_uz**2 + dz_uz**2 + hoop**2)
    mask = rhs > 0.0
    if not mask.any():
        return 0.0
    return float(np.max(lhs[mask] / rhs[mask]))
