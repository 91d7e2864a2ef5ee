"""Monitored functionals: M(t), dissipation terms, vorticity/current monitors and balance residuals."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.integrate import cumulative_trapezoid, trapezoid

from .elliptic import biot_savart
from .exceptions import DomainError
from .exponents import ExponentSet, Number, exponent_set, lambda_interp
from .grid import Grid, Parity, ScalarField, grad_power_norm, lp_norm
from .operators import (
    cartesian_gradient_magnitude,
    curl_from_swirl,
    div_weighted_residual,
)

if TYPE_CHECKING:
    from .evolve.state import AxiState, ReformState

__all__ = [
    "BASE_COLUMNS",
    "LP_COLUMNS",
    "BalanceSample",
    "DiagnosticsRow",
    "M_of_reform_state",
    "M_of_state",
    "axis_term",
    "balance_residual_B",
    "balance_sample",
    "biot_savart_ratio",
    "columns",
    "diagnostics_row",
    "dissipation_integrand",
    "dissipation_ledger",
    "ledger_integral",
    "omega_J_of_state",
    "omega_J_monitors",
    "radial_velocity_ratio",
]

BASE_COLUMNS: tuple[str, ...] = (
    "ru_theta_linf",
    "ru_theta_lell",
    "B_l3_2",
    "B_ls",
    "B_l3p_2",
    "eta_lp",
    "V_l7_4",
    "M",
    "grad_eta_p_2",
    "grad_V_7_8",
    "V_7_8_over_r",
    "grad_B_s_2",
    "axis_B_s",
    "b_theta_l3",
    "grad_b_theta_3_2",
    "omega_l3_2",
    "grad_omega_3_4",
    "J_l3_2",
    "ur_over_r_lq1",
    "div_residual",
    "structure_residual",
    "formulation_gap",
)
LP_COLUMNS: tuple[str, ...] = ("besov_u_m1", "besov_u_p1")


def columns(lp_enabled: bool = False) -> tuple[str, ...]:
    """CSV header order: ``time`` first, then the functionals."""
    return ("time", *BASE_COLUMNS, *(LP_COLUMNS if lp_enabled else ()))


class DiagnosticsRow(BaseModel):
    """One time sample of every monitored functional."""

    model_config = ConfigDict(frozen=True)

    time: float
    norms: dict[str, float]

    @field_validator("norms")
    @classmethod
    def _finite_nonnegative(cls, norms: dict[str, float]) -> dict[str, float]:
        for name, value in norms.items():
            if not (math.isfinite(value) and value >= 0.0):
                raise ValueError(f"diagnostic {name}={value} must be finite and nonnegative")
        return norms

    def __getitem__(self, name: str) -> float:
        if name == "time":
            return self.time
        return self.norms[name]

    def values(self, names: Sequence[str]) -> list[float]:
        return [self[name] for name in names]


def M_of_state(B: ScalarField, eta: ScalarField, V: ScalarField, exps: ExponentSet) -> float:
    """M = ||eta||_p^p + ||V||_{7/4}^{7/4} + ||B||_s^s."""
    p, s = float(exps.p), float(exps.s)
    return lp_norm(eta, p) ** p + lp_norm(V, 1.75) ** 1.75 + lp_norm(B, s) ** s


def M_of_reform_state(state: ReformState, p: Number | int) -> float:
    """:func:`M_of_state` of a reformulated state at exponent ``p``."""
    return M_of_state(state.B, state.eta, state.V, exponent_set(p))


def _magnitude(grid: Grid, *components: np.ndarray, name: str) -> ScalarField:
    return ScalarField(grid, np.sqrt(sum(c**2 for c in components)), Parity.EVEN, name)


def omega_J_monitors(u_theta: ScalarField, omega_theta: ScalarField, b_theta: ScalarField) -> tuple[float, float]:
    """(||omega||_{3/2}, ||J||_{3/2}) of the full vorticity and current vectors."""
    omega = _vorticity_magnitude(u_theta, omega_theta)
    j_r, j_z = curl_from_swirl(b_theta)
    current = _magnitude(b_theta.grid, j_r.values, j_z.values, name="J")
    return lp_norm(omega, 1.5), lp_norm(current, 1.5)


def omega_J_of_state(state: AxiState) -> tuple[float, float]:
    """:func:`omega_J_monitors` of a primitive state."""
    return omega_J_monitors(state.u_theta, state.omega_theta, state.b_theta)


def _vorticity_magnitude(u_theta: ScalarField, omega_theta: ScalarField) -> ScalarField:
    w_r, w_z = curl_from_swirl(u_theta)
    return _magnitude(u_theta.grid, w_r.values, omega_theta.values, w_z.values, name="omega")


def axis_term(B: ScalarField, k: float) -> float:
    """2 pi * integral over z of |B|^k at r = 0, extrapolated from the first two cell centres.

    An even profile a + c r^2 sampled at dr/2 and 3dr/2 gives a = (9 g_0 - g_1) / 8.
    """
    power = np.abs(B.values[:2]) ** k
    at_axis = (9.0 * power[0] - power[1]) / 8.0
    return 2.0 * math.pi * float(np.sum(at_axis)) * B.grid.dz


@dataclass(frozen=True, slots=True)
class BalanceSample:
    """(t, ||B||_k^k, ||grad |B|^{k/2}||^2, axis term) for one sample."""

    time: float
    norm_power: float
    dissipation: float
    axis: float


def balance_sample(B: ScalarField, time: float, k: float) -> BalanceSample:
    return BalanceSample(
        time=time,
        norm_power=lp_norm(B, k) ** k,
        dissipation=grad_power_norm(B, k / 2.0) ** 2,
        axis=axis_term(B, k),
    )


def balance_residual_B(samples: Sequence[BalanceSample], k: float, *, t_min: float = 0.0) -> float:
    """max over interior samples (t >= t_min) of |dM/dt + 2 axis + (4(k-1)/k) dissipation| / M(0).

    The time derivative is the centred difference of the sampled series.
    """
    if len(samples) < 3:
        raise DomainError("energy balance needs at least 3 samples", {"samples": len(samples)})
    times = np.array([s.time for s in samples])
    norms = np.array([s.norm_power for s in samples])
    rate = (norms[2:] - norms[:-2]) / (times[2:] - times[:-2])
    interior = samples[1:-1]
    residual = np.abs(
        rate
        + 2.0 * np.array([s.axis for s in interior])
        + (4.0 * (k - 1.0) / k) * np.array([s.dissipation for s in interior])
    )
    mask = times[1:-1] >= t_min
    if not mask.any():
        raise DomainError("no interior sample after t_min", {"t_min": t_min})
    scale = norms[0] if norms[0] > 0.0 else 1.0
    return float(np.max(residual[mask])) / scale


def dissipation_integrand(row: DiagnosticsRow, exps: ExponentSet) -> float:
    """(p-1)||grad|eta|^{p/2}||^2 + ||grad|V|^{7/8}||^2 + |||V|^{7/8}/r||^2 at one sample."""
    return (float(exps.p) - 1.0) * row["grad_eta_p_2"] ** 2 + row["grad_V_7_8"] ** 2 + row["V_7_8_over_r"] ** 2


def ledger_integral(rows: Sequence[DiagnosticsRow], exps: ExponentSet) -> np.ndarray:
    """Cumulative trapezoid integral of :func:`dissipation_integrand`, one entry per sample."""
    if not rows:
        return np.zeros(0)
    times = np.array([row.time for row in rows])
    integrand = np.array([dissipation_integrand(row, exps) for row in rows])
    return cumulative_trapezoid(integrand, times, initial=0.0)


def dissipation_ledger(rows: Sequence[DiagnosticsRow], exps: ExponentSet) -> float:
    """M(t_end) plus the time-integrated dissipation weighted by the regularity bound's prefactors."""
    if not rows:
        return 0.0
    times = np.array([row.time for row in rows])
    integrand = np.array([dissipation_integrand(row, exps) for row in rows])
    integral = float(trapezoid(integrand, times)) if len(rows) > 1 else 0.0
    return rows[-1]["M"] + integral


def radial_velocity_ratio(omega_theta: ScalarField, p: float, q: float) -> float:
    """||u^r/r||_q / (||eta||_p^lambda ||eta||_{3p}^{1-lambda}) with eta = omega/r."""
    lam = float(lambda_interp(p, q))
    u_r, _ = biot_savart(omega_theta)
    eta = omega_theta.times_r_power(-1.0, Parity.EVEN, "eta")
    denominator = lp_norm(eta, p) ** lam * lp_norm(eta, 3.0 * p) ** (1.0 - lam)
    numerator = lp_norm(u_r, q, -1.0)
    if denominator == 0.0:
        return 0.0 if numerator == 0.0 else math.inf
    return numerator / denominator


def biot_savart_ratio(omega_theta: ScalarField, m: float) -> float:
    """||grad u~||_m / (m^2/(m-1) ||omega^theta||_m)."""
    if not m > 1.0:
        raise DomainError.out_of_range("m", m, "]1, inf[")
    u_r, u_z = biot_savart(omega_theta)
    gradient = ScalarField(omega_theta.grid, cartesian_gradient_magnitude(u_r, u_z), Parity.EVEN, "grad_u")
    denominator = m * m / (m - 1.0) * lp_norm(omega_theta, m)
    numerator = lp_norm(gradient, m)
    if denominator == 0.0:
        return 0.0 if numerator == 0.0 else math.inf
    return numerator / denominator


def diagnostics_row(
    time: float,
    u_theta: ScalarField,
    b_theta: ScalarField,
    omega_theta: ScalarField,
    u_r: ScalarField,
    u_z: ScalarField,
    B: ScalarField,
    eta: ScalarField,
    V: ScalarField,
    exps: ExponentSet,
    *,
    structure_residual: float = 0.0,
    formulation_gap: float = 0.0,
    extra: dict[str, float] | None = None,
) -> DiagnosticsRow:
    """Evaluate every column of :data:`BASE_COLUMNS` (plus ``extra``) from one consistent pair of views."""
    p, s = float(exps.p), float(exps.s)
    omega_norm, current_norm = omega_J_monitors(u_theta, omega_theta, b_theta)
    v_power = np.abs(V.values) ** 0.875
    v_over_r = ScalarField(V.grid, v_power, Parity.EVEN, "V_7_8").times_r_power(-1.0)
    norms = {
        "ru_theta_linf": lp_norm(u_theta, math.inf, 1.0),
        "ru_theta_lell": lp_norm(u_theta, float(exps.ell), 1.0),
        "B_l3_2": lp_norm(B, 1.5),
        "B_ls": lp_norm(B, s),
        "B_l3p_2": lp_norm(B, 1.5 * p),
        "eta_lp": lp_norm(eta, p),
        "V_l7_4": lp_norm(V, 1.75),
        "M": M_of_state(B, eta, V, exps),
        "grad_eta_p_2": grad_power_norm(eta, p / 2.0),
        "grad_V_7_8": grad_power_norm(V, 0.875),
        "V_7_8_over_r": lp_norm(v_over_r, 2.0),
        "grad_B_s_2": grad_power_norm(B, s / 2.0),
        "axis_B_s": axis_term(B, s),
        "b_theta_l3": lp_norm(b_theta, 3.0),
        "grad_b_theta_3_2": grad_power_norm(b_theta, 1.5),
        "omega_l3_2": omega_norm,
        "grad_omega_3_4": grad_power_norm(_vorticity_magnitude(u_theta, omega_theta), 0.75),
        "J_l3_2": current_norm,
        "ur_over_r_lq1": lp_norm(u_r, float(exps.q1), -1.0),
        "div_residual": div_weighted_residual(u_r, u_z),
        "structure_residual": structure_residual,
        "formulation_gap": formulation_gap,
    }
    norms.update(extra or {})
    return DiagnosticsRow(time=time, norms=norms)

