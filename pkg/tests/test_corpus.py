from __future__ import annotations

import numpy as np
import pytest

from swirlmhd.grid import Grid, Parity, lp_norm
from swirlmhd.harness.config import GridConfig, InitialConfig, LPConfig, RunConfig
from swirlmhd.harness.corpus import generate_initial_data, random_small_configs, random_vorticity_fields


def test_small_configs_are_seeded() -> None:
    base = RunConfig(name="base")
    configs = random_small_configs(base, 3, seed=11)
    assert configs == random_small_configs(base, 3, seed=11)
    assert configs != random_small_configs(base, 3, seed=12)
    assert [cfg.name for cfg in configs] == ["base-00", "base-01", "base-02"]
    for cfg in configs:
        assert cfg.initial.generator == "calibrated"
        assert 0.3 <= cfg.initial.radius_fraction <= 0.6
        assert 1e-3 <= abs(cfg.initial.A_omega) <= 1e-1
        assert 0.2 <= cfg.initial.margin <= 0.9


def test_vorticity_fields_are_seeded_and_odd(grid: Grid) -> None:
    fields = random_vorticity_fields(grid, 4, seed=3)
    assert [f.name for f in fields] == ["omega_0", "omega_1", "omega_2", "omega_3"]
    assert all(f.parity is Parity.ODD for f in fields)
    again = random_vorticity_fields(grid, 4, seed=3)
    for a, b in zip(fields, again, strict=True):
        np.testing.assert_array_equal(a.values, b.values)


def test_vorticity_geometry_survives_refinement(grid: Grid) -> None:
    coarse = random_vorticity_fields(grid, 3, seed=5)
    fine = random_vorticity_fields(grid.refined(), 3, seed=5)
    for a, b in zip(coarse, fine, strict=True):
        assert lp_norm(b, 2.0) == pytest.approx(lp_norm(a, 2.0), rel=0.1)


def test_calibrated_initial_data_are_small() -> None:
    data = generate_initial_data(RunConfig(grid=GridConfig(Nr=16, Nz=16)))
    assert data.smallness.passed
    assert set(data.critical) == {"omega_l3_2", "J_l3_2", "N0"}
    assert data.primitive.grid == data.reform.grid


def test_large_bump_fails_smallness_and_reports_besov() -> None:
    cfg = RunConfig(
        grid=GridConfig(Nr=16, Nz=16),
        initial=InitialConfig(generator="bump", A_u=1.0, A_b=1.0, A_omega=1.0),
        lp=LPConfig(enabled=True, N=16),
    )
    data = generate_initial_data(cfg)
    assert not data.smallness.passed
    assert data.critical["besov_u_m1"] > 0.0
