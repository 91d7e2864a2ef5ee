"""Initial data for runs, and seeded corpora of configurations and fields for the suites."""

from __future__ import annotations

import logging
import math

import numpy as np

from ..evolve.initial import (
    Amplitudes,
    BumpProfile,
    InitialData,
    calibrate_amplitudes,
    initial_norms,
    primitive_bump_state,
)
from ..evolve.state import reform_from_primitive
from ..exponents import check_smallness, compute_N0, exponent_set
from ..functionals import omega_J_monitors
from ..grid import Grid, Parity, ScalarField, lp_norm
from ..littlewood_paley import besov_norm, embed_velocity
from ..utils import make_rng
from .config import RunConfig

__all__ = ["generate_initial_data", "random_small_configs", "random_vorticity_fields"]


def generate_initial_data(cfg: RunConfig) -> InitialData:
    """Bump data for ``cfg`` with its controlling norms and smallness verdict."""
    grid = cfg.grid.to_grid()
    exps = exponent_set(cfg.p)
    initial = cfg.initial
    profile = BumpProfile.from_fractions(grid, initial.radius_fraction, initial.height_fraction, initial.center_fraction)
    if initial.generator == "calibrated":
        amplitudes = calibrate_amplitudes(
            grid, profile, exps, cfg.c0, omega_amplitude=initial.A_omega, margin=initial.margin
        )
        logging.info("calibrated amplitudes A_u=%.6e A_b=%.6e", amplitudes.u, amplitudes.b)
    else:
        amplitudes = Amplitudes(initial.A_u, initial.A_b, initial.A_omega)
    primitive = primitive_bump_state(grid, profile, amplitudes)
    reform = reform_from_primitive(primitive, float(exps.epsilon))
    norms = initial_norms(primitive, reform, exps)
    smallness = check_smallness(exps.p, cfg.c0, norms)
    omega_norm, current_norm = omega_J_monitors(primitive.u_theta, primitive.omega_theta, primitive.b_theta)
    critical = {
        "omega_l3_2": omega_norm,
        "J_l3_2": current_norm,
        "N0": float(compute_N0(omega_norm, current_norm, lp_norm(primitive.u_theta, math.inf, 1.0), norms.M0, exps.p)),
    }
    if cfg.lp.enabled:
        velocity = embed_velocity(primitive.velocity(), cfg.lp.N, cfg.lp.L)
        critical["besov_u_m1"] = besov_norm(velocity, -1.0, math.inf, 1.0, physical=True)
    if not smallness.passed:
        logging.warning("initial data of %s fail the smallness conditions (margins %s)", cfg.name, smallness.margins)
    return InitialData(primitive, reform, norms, smallness, critical)


def random_small_configs(base: RunConfig, count: int, seed: int) -> list[RunConfig]:
    """``count`` calibrated configurations with random bump geometry, vorticity and margin."""
    rng = make_rng(seed, "small-data")
    configs = []
    for index in range(count):
        initial = base.initial.model_copy(
            update={
                "generator": "calibrated",
                "radius_fraction": float(rng.uniform(0.3, 0.6)),
                "height_fraction": float(rng.uniform(0.15, 0.3)),
                "center_fraction": 0.5,
                "A_omega": float(rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-3.0, -1.0)),
                "margin": float(rng.uniform(0.2, 0.9)),
            }
        )
        configs.append(base.model_copy(update={"name": f"{base.name}-{index:02d}", "initial": initial}))
    return configs


def random_vorticity_fields(grid: Grid, count: int, seed: int) -> list[ScalarField]:
    """Sums of one to three bumps r chi(r, z) with random radii, heights, centres and signs.

    The geometry is drawn in units of the domain, so the same seed gives the same fields on a refined grid.
    """
    rng = make_rng(seed, "vorticity")
    fields = []
    for index in range(count):
        values = np.zeros(grid.shape)
        for _ in range(int(rng.integers(1, 4))):
            half_height = float(rng.uniform(0.15, 0.25)) * grid.Lz
            profile = BumpProfile(
                radius=float(rng.uniform(0.25, 0.6)) * grid.Rmax,
                half_height=half_height,
                center=float(rng.uniform(half_height, grid.Lz - half_height)),
            )
            values += float(rng.normal()) * grid.r_column * profile.sample(grid)
        fields.append(ScalarField(grid, values, Parity.ODD, f"omega_{index}"))
    return fields
