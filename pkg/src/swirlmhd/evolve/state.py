"""Solver states, stepper settings and the maps between the two formulations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from ..elliptic import diagnose_velocity
from ..exceptions import BlowUpError, ContractError
from ..grid import Grid, Parity, ScalarField
from ..operators import FaceFluxes, RadialStencil

__all__ = [
    "AxiState",
    "FullBState",
    "ReformState",
    "Scheme",
    "StepperConfig",
    "VelocityField",
    "check_finite",
    "explicit_diffusion_bound",
    "primitive_from_reform",
    "reform_from_primitive",
    "relative_gap",
    "rate_limit",
    "resolved_dt",
]


class Scheme(str, Enum):
    IMEX_EULER = "imex_euler"
    EXPLICIT_RK2 = "explicit_rk2"


class StepperConfig(BaseModel):
    """Time-stepping settings; ``dt = None`` lets the runner pick ``cfl_safety`` times the stability bound."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float | None = Field(default=None, gt=0)
    scheme: Scheme = Scheme.IMEX_EULER
    cfl_safety: float = Field(default=0.5, gt=0, lt=1)
    t_end: float = Field(default=0.5, ge=0)
    sample_every: int = Field(default=1, ge=1)
    track_structure: bool = False


def resolved_dt(cfg: StepperConfig) -> float:
    if cfg.dt is None:
        raise ContractError("stepping needs a resolved dt; let the runner choose one or set stepper.dt")
    return cfg.dt


def check_finite(time: float, *fields: ScalarField) -> None:
    for f in fields:
        if not f.is_finite():
            raise BlowUpError(f.name or "field", time)


def _require(f: ScalarField, parity: Parity, owner: str) -> None:
    if f.parity is not parity:
        raise ContractError.parity(owner, parity.value, f.parity.value)


@dataclass(frozen=True, slots=True, eq=False)
class VelocityField:
    """Velocity (u^r, u^theta, u^z); ``fluxes`` are the divergence-free face fluxes when known."""

    u_r: ScalarField
    u_theta: ScalarField
    u_z: ScalarField
    fluxes: FaceFluxes | None = None

    @classmethod
    def zero(cls, grid: Grid) -> VelocityField:
        return cls(grid.zeros(Parity.ODD, "u_r"), grid.zeros(Parity.ODD, "u_theta"), grid.zeros(Parity.EVEN, "u_z"))


@dataclass(frozen=True, slots=True, eq=False)
class AxiState:
    """Primitive reduced system; (u_r, u_z) and the face fluxes are diagnosed from omega_theta."""

    time: float
    u_theta: ScalarField
    b_theta: ScalarField
    omega_theta: ScalarField
    u_r: ScalarField
    u_z: ScalarField
    fluxes: FaceFluxes

    @classmethod
    def from_fields(
        cls, time: float, u_theta: ScalarField, b_theta: ScalarField, omega_theta: ScalarField
    ) -> AxiState:
        for f in (u_theta, b_theta, omega_theta):
            _require(f, Parity.ODD, "AxiState")
        check_finite(time, u_theta, b_theta, omega_theta)
        stream = diagnose_velocity(omega_theta)
        return cls(
            time,
            u_theta.renamed("u_theta"),
            b_theta.renamed("b_theta"),
            omega_theta.renamed("omega_theta"),
            stream.u_r,
            stream.u_z,
            stream.fluxes,
        )

    @classmethod
    def zero(cls, grid: Grid, time: float = 0.0) -> AxiState:
        return cls.from_fields(time, grid.zeros(Parity.ODD), grid.zeros(Parity.ODD), grid.zeros(Parity.ODD))

    @property
    def grid(self) -> Grid:
        return self.u_theta.grid

    @property
    def gamma(self) -> ScalarField:
        """Gamma = r u^theta, the transported swirl circulation (even)."""
        return self.u_theta.times_r_power(1.0, Parity.EVEN, "gamma")

    def velocity(self) -> VelocityField:
        return VelocityField(self.u_r, self.u_theta, self.u_z, self.fluxes)


@dataclass(frozen=True, slots=True, eq=False)
class ReformState:
    """Reformulated system B = b/r, eta = omega/r, V = u/r^(1 - epsilon), all even."""

    time: float
    B: ScalarField
    eta: ScalarField
    V: ScalarField
    epsilon: float
    u_r: ScalarField
    u_z: ScalarField
    fluxes: FaceFluxes

    @classmethod
    def from_fields(
        cls, time: float, B: ScalarField, eta: ScalarField, V: ScalarField, epsilon: float
    ) -> ReformState:
        for f in (B, eta, V):
            _require(f, Parity.EVEN, "ReformState")
        if not 0.0 < epsilon < 1.0:
            raise ContractError(f"ReformState needs epsilon in ]0, 1[, got {epsilon}")
        check_finite(time, B, eta, V)
        omega = eta.times_r_power(1.0, Parity.ODD, "omega_theta")
        stream = diagnose_velocity(omega)
        return cls(
            time,
            B.renamed("B"),
            eta.renamed("eta"),
            V.renamed("V"),
            float(epsilon),
            stream.u_r,
            stream.u_z,
            stream.fluxes,
        )

    @classmethod
    def zero(cls, grid: Grid, epsilon: float, time: float = 0.0) -> ReformState:
        zeros = grid.zeros(Parity.EVEN)
        return cls.from_fields(time, zeros, zeros, zeros, epsilon)

    @property
    def grid(self) -> Grid:
        return self.B.grid

    def velocity(self) -> VelocityField:
        u_theta = self.V.times_r_power(1.0 - self.epsilon, Parity.ODD, "u_theta")
        return VelocityField(self.u_r, u_theta, self.u_z, self.fluxes)


@dataclass(frozen=True, slots=True, eq=False)
class FullBState:
    time: float
    b_r: ScalarField
    b_theta: ScalarField
    b_z: ScalarField

    def __post_init__(self) -> None:
        _require(self.b_r, Parity.ODD, "FullBState")
        _require(self.b_theta, Parity.ODD, "FullBState")
        _require(self.b_z, Parity.EVEN, "FullBState")

    @classmethod
    def pure_swirl(cls, b_theta: ScalarField, time: float = 0.0) -> FullBState:
        grid = b_theta.grid
        return cls(time, grid.zeros(Parity.ODD, "b_r"), b_theta.renamed("b_theta"), grid.zeros(Parity.EVEN, "b_z"))

    def structure_residual(self) -> float:
        """max(|b^r|, |b^z|), the departure from the pure-swirl structure."""
        return max(self.b_r.max_abs(), self.b_z.max_abs())


def reform_from_primitive(state: AxiState, epsilon: float) -> ReformState:
    return ReformState.from_fields(
        state.time,
        state.b_theta.times_r_power(-1.0, Parity.EVEN, "B"),
        state.omega_theta.times_r_power(-1.0, Parity.EVEN, "eta"),
        state.u_theta.times_r_power(-(1.0 - epsilon), Parity.EVEN, "V"),
        epsilon,
    )


def primitive_from_reform(state: ReformState) -> AxiState:
    return AxiState.from_fields(
        state.time,
        state.V.times_r_power(1.0 - state.epsilon, Parity.ODD, "u_theta"),
        state.B.times_r_power(1.0, Parity.ODD, "b_theta"),
        state.eta.times_r_power(1.0, Parity.ODD, "omega_theta"),
    )


def relative_gap(reference: ScalarField, other: ScalarField, scale: float | None = None) -> float:
    """Cylindrical L^2 distance relative to ``scale`` (default: the L^2 norm of ``reference``)."""
    diff = reference.values - other.values
    grid = reference.grid
    distance = math.sqrt(float((diff**2 * grid.cell_measure).sum()))
    if scale is None:
        scale = math.sqrt(float((reference.values**2 * grid.cell_measure).sum()))
    if distance == 0.0:
        return 0.0
    return distance / scale if scale > 0 else math.inf


def rate_limit(rate: float) -> float:
    """Forward-Euler time scale 1/rate of a linear damping or growth coefficient."""
    return math.inf if rate <= 0.0 else 1.0 / rate


def explicit_diffusion_bound(grid: Grid, stencils: tuple[RadialStencil, ...]) -> float:
    """Heun is stable for real spectra in [-2/dt, 0]; bound the spectrum by Gershgorin discs."""
    radius = max(stencil.gershgorin_radius() for stencil in stencils) + 4.0 / grid.dz**2
    return 2.0 / radius
