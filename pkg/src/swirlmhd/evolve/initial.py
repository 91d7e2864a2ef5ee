"""Compactly supported bump initial data and amplitude calibration against the smallness conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..exceptions import DomainError
from ..exponents import ExponentSet, InitialNorms, SmallnessReport, check_smallness
from ..grid import FloatArray, Grid, Parity, ScalarField, lp_norm
from .state import AxiState, ReformState, reform_from_primitive

__all__ = [
    "Amplitudes",
    "BumpProfile",
    "InitialData",
    "bump",
    "calibrate_amplitudes",
    "initial_norms",
    "primitive_bump_state",
]


def bump(x: FloatArray) -> FloatArray:
    """exp(1 - 1/(1 - x^2)) on ]-1, 1[, zero elsewhere; equals 1 at the origin."""
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


@dataclass(frozen=True, slots=True)
class BumpProfile:
    """chi(r, z) = bump(r / radius) bump((z - center) / half_height)."""

    radius: float
    half_height: float
    center: float

    @classmethod
    def from_fractions(
        cls,
        grid: Grid,
        radius_fraction: float = 0.5,
        height_fraction: float = 0.25,
        center_fraction: float = 0.5,
    ) -> BumpProfile:
        profile = cls(radius_fraction * grid.Rmax, height_fraction * grid.Lz, center_fraction * grid.Lz)
        profile.check_inside(grid)
        return profile

    def check_inside(self, grid: Grid) -> None:
        if not 0.0 < self.radius < grid.Rmax:
            raise DomainError.out_of_range("bump radius", self.radius, f"]0, {grid.Rmax}[")
        low, high = self.center - self.half_height, self.center + self.half_height
        if self.half_height <= 0.0 or low < 0.0 or high > grid.Lz:
            raise DomainError.out_of_range("bump axial support", (low, high), f"[0, {grid.Lz}]")

    def sample(self, grid: Grid) -> FloatArray:
        r, z = grid.mesh()
        return bump(r / self.radius) * bump((z - self.center) / self.half_height)


@dataclass(frozen=True, slots=True)
class Amplitudes:
    u: float = 0.0
    b: float = 0.0
    omega: float = 0.0


def primitive_bump_state(grid: Grid, profile: BumpProfile, amplitudes: Amplitudes) -> AxiState:
    """u^theta = A_u r chi, b^theta = A_b r chi, omega^theta = A_omega r chi."""
    profile.check_inside(grid)
    shape = grid.r_column * profile.sample(grid)
    return AxiState.from_fields(
        0.0,
        ScalarField(grid, amplitudes.u * shape, Parity.ODD, "u_theta"),
        ScalarField(grid, amplitudes.b * shape, Parity.ODD, "b_theta"),
        ScalarField(grid, amplitudes.omega * shape, Parity.ODD, "omega_theta"),
    )


def initial_norms(primitive: AxiState, reform: ReformState, exps: ExponentSet) -> InitialNorms:
    """Every norm of the initial data that the smallness conditions and M0 need."""
    p = float(exps.p)
    u = primitive.u_theta
    s = float(exps.s)
    eta_p = lp_norm(reform.eta, p)
    V_74 = lp_norm(reform.V, 1.75)
    B_s = lp_norm(reform.B, s)
    return InitialNorms(
        ru_linf=lp_norm(u, math.inf, 1.0),
        ru_lell=lp_norm(u, float(exps.ell), 1.0),
        ru_lell_alt=lp_norm(u, float(exps.ell_alt), 1.0),
        B_l3_2=lp_norm(reform.B, 1.5),
        B_l3p_2=lp_norm(reform.B, 1.5 * p),
        B_ls=B_s,
        M0=eta_p**p + V_74**1.75 + B_s**s,
    )


@dataclass(frozen=True, slots=True, eq=False)
class InitialData:
    """Both views of the data, its controlling norms and the smallness verdict.

    ``critical`` holds the scale-invariant norms (omega and J in L^{3/2}, N0, and the
    B^{-1}_{inf,1} velocity norm when it was computed).
    """

    primitive: AxiState
    reform: ReformState
    norms: InitialNorms
    smallness: SmallnessReport
    critical: dict[str, float] = field(default_factory=dict)


def _norms_at(unit: InitialNorms, amplitudes: Amplitudes, unit_parts: tuple[float, float, float], exps: ExponentSet) -> InitialNorms:
    # every norm is positively homogeneous in the amplitude of its own field
    p, s = float(exps.p), float(exps.s)
    eta_p, V_74, B_s = unit_parts
    a_u, a_b, a_w = abs(amplitudes.u), abs(amplitudes.b), abs(amplitudes.omega)
    return InitialNorms(
        ru_linf=a_u * unit.ru_linf,
        ru_lell=a_u * unit.ru_lell,
        ru_lell_alt=a_u * (unit.ru_lell_alt or 0.0),
        B_l3_2=a_b * unit.B_l3_2,
        B_l3p_2=a_b * unit.B_l3p_2,
        B_ls=a_b * B_s,
        M0=(a_w * eta_p) ** p + (a_u * V_74) ** 1.75 + (a_b * B_s) ** s,
    )


def calibrate_amplitudes(
    grid: Grid,
    profile: BumpProfile,
    exps: ExponentSet,
    c0: float,
    *,
    omega_amplitude: float,
    margin: float = 0.5,
    passes: int = 3,
) -> Amplitudes:
    """Largest (A_u, A_b) for which each smallness left-hand side is ``margin`` times its bound.

    Norms are computed once at unit amplitude and rescaled; each amplitude is found by ``brentq``
    on its logarithm with the other held fixed, alternating for a few passes since both bounds
    depend on M0.
    """
    if not 0.0 < margin < 1.0:
        raise DomainError.out_of_range("margin", margin, "]0, 1[")
    unit_state = primitive_bump_state(grid, profile, Amplitudes(1.0, 1.0, 1.0))
    unit_reform = reform_from_primitive(unit_state, float(exps.epsilon))
    unit = initial_norms(unit_state, unit_reform, exps)
    unit_parts = (
        lp_norm(unit_reform.eta, float(exps.p)),
        lp_norm(unit_reform.V, 1.75),
        lp_norm(unit_reform.B, float(exps.s)),
    )
    target = math.log(margin)

    def gap(log_amplitude: float, which: str, current: Amplitudes) -> float:
        trial = Amplitudes(
            u=math.exp(log_amplitude) if which == "u" else current.u,
            b=math.exp(log_amplitude) if which == "b" else current.b,
            omega=current.omega,
        )
        report = check_smallness(exps.p, c0, _norms_at(unit, trial, unit_parts, exps))
        lhs, rhs = (report.lhs_swirl, report.rhs_swirl) if which == "u" else (report.lhs_B, report.rhs_B)
        return math.log(lhs / rhs) - target

    amplitudes = Amplitudes(0.0, 0.0, omega_amplitude)
    for _ in range(passes):
        for which in ("b", "u"):
            solved = math.exp(brentq(gap, -80.0, 20.0, args=(which, amplitudes), xtol=1e-10))
            amplitudes = Amplitudes(
                u=solved if which == "u" else amplitudes.u,
                b=solved if which == "b" else amplitudes.b,
                omega=amplitudes.omega,
            )
    return amplitudes
