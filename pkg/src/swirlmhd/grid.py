"""Cell-centred cylindrical (r, z) grid, scalar fields with axis parity, quadrature and snapshots."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from .exceptions import ContractError

__all__ = [
    "MAGIC",
    "POWER_FLOOR",
    "Grid",
    "Parity",
    "ScalarField",
    "central_gradient",
    "fill_ghosts",
    "grad_power_norm",
    "integrate",
    "lp_norm",
    "read_snapshot",
    "refill_ghosts",
    "write_snapshot",
]

MAGIC = "SWIRLMHD1"
POWER_FLOOR = 1e-30

FloatArray = NDArray[np.float64]


class Parity(str, Enum):
    """Behaviour under r -> -r, used to fill the axis ghost cells."""

    EVEN = "even"
    ODD = "odd"

    @property
    def sign(self) -> float:
        return 1.0 if self is Parity.EVEN else -1.0

    def flipped(self) -> Parity:
        return Parity.ODD if self is Parity.EVEN else Parity.EVEN


class Grid(BaseModel):
    """Half-plane r in ]0, Rmax[ (Dirichlet at Rmax) times a z-period of length Lz."""

    model_config = ConfigDict(frozen=True)

    Nr: int = Field(ge=8)
    Nz: int = Field(ge=8)
    Rmax: float = Field(gt=0)
    Lz: float = Field(gt=0)

    @property
    def dr(self) -> float:
        return self.Rmax / self.Nr

    @property
    def dz(self) -> float:
        return self.Lz / self.Nz

    @property
    def shape(self) -> tuple[int, int]:
        return (self.Nr, self.Nz)

    @property
    def r_centers(self) -> FloatArray:
        return (np.arange(self.Nr) + 0.5) * self.dr

    @property
    def r_faces(self) -> FloatArray:
        """Radii of the Nr + 1 cell faces, from the axis to Rmax."""
        return np.arange(self.Nr + 1) * self.dr

    @property
    def z_centers(self) -> FloatArray:
        return (np.arange(self.Nz) + 0.5) * self.dz

    @property
    def r_column(self) -> FloatArray:
        return self.r_centers[:, None]

    @property
    def cell_measure(self) -> FloatArray:
        """2 pi r dr dz per cell, broadcastable against an (Nr, Nz) array."""
        return 2.0 * math.pi * self.r_column * self.dr * self.dz

    @property
    def h(self) -> float:
        return max(self.dr, self.dz)

    def refined(self, factor: int = 2) -> Grid:
        return Grid(Nr=self.Nr * factor, Nz=self.Nz * factor, Rmax=self.Rmax, Lz=self.Lz)

    def mesh(self) -> tuple[FloatArray, FloatArray]:
        return np.meshgrid(self.r_centers, self.z_centers, indexing="ij")

    def zeros(self, parity: Parity, name: str = "") -> ScalarField:
        return ScalarField(self, np.zeros(self.shape), parity, name)

    def sample(self, func: Callable[[FloatArray, FloatArray], FloatArray], parity: Parity, name: str = "") -> ScalarField:
        r, z = self.mesh()
        return ScalarField(self, np.broadcast_to(func(r, z), self.shape), parity, name)


@dataclass(frozen=True, slots=True, eq=False)
class ScalarField:
    """Read-only Nr x Nz array of cell averages with a declared parity."""

    grid: Grid
    values: FloatArray
    parity: Parity
    name: str = field(default="")

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise ContractError(f"field {self.name!r} has shape {values.shape}, grid expects {self.grid.shape}")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    def with_values(self, values: FloatArray, name: str | None = None) -> ScalarField:
        return ScalarField(self.grid, values, self.parity, self.name if name is None else name)

    def renamed(self, name: str) -> ScalarField:
        return ScalarField(self.grid, self.values, self.parity, name)

    def scaled(self, factor: float) -> ScalarField:
        return self.with_values(factor * self.values)

    def times_r_power(self, power: float, parity: Parity | None = None, name: str | None = None) -> ScalarField:
        """Pointwise r^power * f; the caller states the parity of the product."""
        values = self.values * self.grid.r_column**power
        return ScalarField(self.grid, values, self.parity if parity is None else parity, self.name if name is None else name)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def refill_ghosts(padded: FloatArray, parity: Parity, width: int) -> FloatArray:
    """Overwrite the ghost frame of ``padded`` from its interior, in place."""
    w = width
    interior = padded[w:-w, w:-w]
    nr = interior.shape[0]
    for k in range(w):
        padded[w - 1 - k, w:-w] = parity.sign * interior[k]
        padded[w + nr + k, w:-w] = -interior[nr - 1 - k]
    padded[:, :w] = padded[:, -2 * w : -w]
    padded[:, -w:] = padded[:, w : 2 * w]
    return padded


def fill_ghosts(f: ScalarField, width: int = 1) -> FloatArray:
    """Pad with parity ghosts at the axis, odd reflection at Rmax (Dirichlet 0) and periodic z."""
    if width < 1:
        raise ContractError(f"ghost width must be positive, got {width}")
    if width > min(f.grid.Nr, f.grid.Nz):
        raise ContractError(f"ghost width {width} exceeds the grid")
    padded = np.zeros((f.grid.Nr + 2 * width, f.grid.Nz + 2 * width))
    padded[width:-width, width:-width] = f.values
    return refill_ghosts(padded, f.parity, width)


def central_gradient(padded: FloatArray, dr: float, dz: float, width: int = 1) -> tuple[FloatArray, FloatArray]:
    """Second-order central differences on the interior of a width-``width`` padded array."""
    w = width
    d_r = (padded[w + 1 : padded.shape[0] - w + 1, w:-w] - padded[w - 1 : padded.shape[0] - w - 1, w:-w]) / (2.0 * dr)
    d_z = (padded[w:-w, w + 1 : padded.shape[1] - w + 1] - padded[w:-w, w - 1 : padded.shape[1] - w - 1]) / (2.0 * dz)
    return d_r, d_z


def integrate(grid: Grid, values: FloatArray) -> float:
    """Midpoint rule for the integral over R^3 of an axisymmetric density."""
    return float(np.sum(values * grid.cell_measure))


def lp_norm(f: ScalarField, p: float, weight_power: float = 0.0) -> float:
    """||r^w f||_{L^p(R^3)} with the measure 2 pi r dr dz; p = inf is the grid maximum."""
    p = float(p)
    weight_power = float(weight_power)
    if not p > 0:
        raise ContractError(f"lp_norm needs p > 0, got {p}")
    magnitude = np.abs(f.values)
    if weight_power != 0.0:
        magnitude = magnitude * f.grid.r_column**weight_power
    if magnitude.size == 0:
        return 0.0
    peak = float(np.max(magnitude))
    if peak == 0.0 or not math.isfinite(peak):
        return peak
    if math.isinf(p):
        return peak
    # normalising by the peak makes the norm exactly homogeneous under power-of-two scalings
    total = float(np.sum((magnitude / peak) ** p * f.grid.cell_measure))
    return peak * total ** (1.0 / p)


def grad_power_norm(f: ScalarField, alpha: float) -> float:
    """||grad |f|^alpha||_{L^2(R^3)} by central differences of the floored power."""
    alpha = float(alpha)
    if not alpha > 0:
        raise ContractError(f"grad_power_norm needs alpha > 0, got {alpha}")
    padded = np.maximum(np.abs(fill_ghosts(f)), POWER_FLOOR) ** alpha
    d_r, d_z = central_gradient(padded, f.grid.dr, f.grid.dz)
    return math.sqrt(integrate(f.grid, d_r**2 + d_z**2))


def write_snapshot(path: str | Path, f: ScalarField, time: float) -> Path:
    """Binary snapshot: one ASCII header line then little-endian doubles, r fastest."""
    path = Path(path)
    name = "_".join(f.name.split()) or "field"
    grid = f.grid
    header = f"{MAGIC} {grid.Nr} {grid.Nz} {grid.Rmax!r} {grid.Lz!r} {float(time)!r} {name} {f.parity.value}\n"
    payload = np.asarray(f.values, dtype="<f8").ravel(order="F").tobytes()
    path.write_bytes(header.encode("ascii") + payload)
    return path


def read_snapshot(path: str | Path) -> tuple[ScalarField, float]:
    raw = Path(path).read_bytes()
    newline = raw.find(b"\n")
    if newline < 0:
        raise ContractError(f"{path}: missing snapshot header")
    parts = raw[:newline].decode("ascii").split()
    if len(parts) != 8 or parts[0] != MAGIC:
        raise ContractError(f"{path}: not a {MAGIC} snapshot")
    _, nr, nz, rmax, lz, time, name, parity = parts
    grid = Grid(Nr=int(nr), Nz=int(nz), Rmax=float(rmax), Lz=float(lz))
    data = np.frombuffer(raw[newline + 1 :], dtype="<f8")
    if data.size != grid.Nr * grid.Nz:
        raise ContractError(f"{path}: expected {grid.Nr * grid.Nz} values, found {data.size}")
    values = data.reshape(grid.shape, order="F")
    return ScalarField(grid, values, Parity(parity), name), float(time)
