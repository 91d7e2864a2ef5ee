from __future__ import annotations

import math

import numpy as np
import pytest

from swirlmhd.exceptions import ContractError
from swirlmhd.grid import (
    Grid,
    Parity,
    ScalarField,
    fill_ghosts,
    grad_power_norm,
    integrate,
    lp_norm,
    read_snapshot,
    write_snapshot,
)


def test_geometry(grid: Grid) -> None:
    assert grid.dr == 0.125
    assert grid.dz == 0.25
    assert grid.h == 0.25
    assert grid.r_faces[0] == 0.0
    assert grid.r_faces[-1] == pytest.approx(grid.Rmax)
    assert grid.refined().shape == (64, 64)


def test_integrate_recovers_cylinder_volume(grid: Grid) -> None:
    volume = integrate(grid, np.ones(grid.shape))
    assert volume == pytest.approx(math.pi * grid.Rmax**2 * grid.Lz, rel=1e-12)


def test_fields_are_read_only(grid: Grid) -> None:
    f = grid.zeros(Parity.ODD)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0


def test_shape_mismatch_is_a_contract_error(grid: Grid) -> None:
    with pytest.raises(ContractError):
        ScalarField(grid, np.zeros((3, 3)), Parity.EVEN)


@pytest.mark.parametrize("parity", [Parity.EVEN, Parity.ODD])
def test_ghosts_follow_parity_and_boundaries(grid: Grid, parity: Parity, rng: np.random.Generator) -> None:
    f = ScalarField(grid, rng.standard_normal(grid.shape), parity)
    padded = fill_ghosts(f)
    np.testing.assert_array_equal(padded[0, 1:-1], parity.sign * f.values[0])
    np.testing.assert_array_equal(padded[-1, 1:-1], -f.values[-1])
    np.testing.assert_array_equal(padded[1:-1, 0], f.values[:, -1])
    np.testing.assert_array_equal(padded[1:-1, -1], f.values[:, 0])


def test_parity_flip() -> None:
    assert Parity.EVEN.flipped() is Parity.ODD
    assert Parity.ODD.flipped() is Parity.EVEN


def test_lp_norm_is_homogeneous(grid: Grid, rng: np.random.Generator) -> None:
    f = ScalarField(grid, rng.standard_normal(grid.shape), Parity.EVEN)
    for p in (1.5, 2.0, 3.0, math.inf):
        assert lp_norm(f.scaled(2.0), p) == 2.0 * lp_norm(f, p)


def test_weighted_sup_norm(grid: Grid) -> None:
    f = grid.sample(lambda r, z: np.ones_like(r), Parity.EVEN)
    assert lp_norm(f, math.inf, 1.0) == pytest.approx(grid.r_centers[-1])


def test_l2_norm_of_constant(grid: Grid) -> None:
    f = grid.sample(lambda r, z: 3.0 * np.ones_like(r), Parity.EVEN)
    expected = 3.0 * math.sqrt(math.pi * grid.Rmax**2 * grid.Lz)
    assert lp_norm(f, 2.0) == pytest.approx(expected, rel=1e-12)


def test_invalid_exponents(grid: Grid) -> None:
    f = grid.zeros(Parity.EVEN)
    with pytest.raises(ContractError):
        lp_norm(f, 0.0)
    with pytest.raises(ContractError):
        grad_power_norm(f, -1.0)


def test_snapshot_preserves_field(tmp_path, grid: Grid, rng: np.random.Generator) -> None:
    f = ScalarField(grid, rng.standard_normal(grid.shape), Parity.ODD, "b_theta")
    path = write_snapshot(tmp_path / "b.bin", f, 0.25)
    loaded, time = read_snapshot(path)
    assert time == 0.25
    assert loaded.grid == grid
    assert loaded.parity is Parity.ODD
    assert loaded.name == "b_theta"
    np.testing.assert_array_equal(loaded.values, f.values)


def test_truncated_snapshot_is_rejected(tmp_path, grid: Grid) -> None:
    path = write_snapshot(tmp_path / "u.bin", grid.zeros(Parity.ODD, "u"), 0.0)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ContractError):
        read_snapshot(path)
    (tmp_path / "junk.bin").write_bytes(b"not a snapshot\n")
    with pytest.raises(ContractError):
        read_snapshot(tmp_path / "junk.bin")
