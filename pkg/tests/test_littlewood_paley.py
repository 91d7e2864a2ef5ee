from __future__ import annotations

import math

import numpy as np
import pytest

from swirlmhd.exceptions import ContractError, DomainError
from swirlmhd.grid import Grid, Parity
from swirlmhd.littlewood_paley import (
    CartesianField3D,
    DyadicPartition,
    bernstein_check,
    besov_norm,
    besov_report,
    chi,
    decompose,
    duhamel_integral,
    duhamel_residual,
    dyadic_block,
    embed_axisymmetric,
    embed_scalar,
    embed_velocity,
    heat_decay_fit,
    heat_flow_exact,
    heat_semigroup,
    leray_project,
    mihlin_ratio,
    phi,
    smooth_step,
    spectral_divergence,
    spectral_gradient,
    truncated_fraction,
)

N, L = 16, 2.0 * math.pi


def coordinates(n: int = N, side: float = L) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = -0.5 * side + np.arange(n) * (side / n)
    return np.meshgrid(x, x, x, indexing="ij")


def tone(j: int, n: int = N, side: float = L) -> CartesianField3D:
    x1, x2, _ = coordinates(n, side)
    return CartesianField3D.scalar(np.cos(2.0 * math.pi * 2.0**j * (x1 + x2) / side), side)


@pytest.fixture
def smooth_vector(rng: np.random.Generator) -> CartesianField3D:
    noise = CartesianField3D([rng.standard_normal((N, N, N)) for _ in range(3)], L)
    return heat_semigroup(noise, 0.05)


def test_smooth_step_and_profiles() -> None:
    np.testing.assert_array_equal(smooth_step(np.array([-1.0, 0.0, 1.0, 2.0])), [0.0, 0.0, 1.0, 1.0])
    assert smooth_step(np.array(0.5)) == pytest.approx(0.5)
    np.testing.assert_array_equal(chi(np.array([0.0, 0.5, 0.75])), [1.0, 1.0, 1.0])
    np.testing.assert_array_equal(chi(np.array([1.5, 3.0])), [0.0, 0.0])
    np.testing.assert_array_equal(phi(np.array([0.0, 0.7, 2.7, 10.0])), [0.0, 0.0, 0.0, 0.0])


def test_partition_of_unity() -> None:
    tau = np.linspace(0.0, 2.0**10, 40001)
    total = chi(tau) + sum(phi(tau * 2.0**-j) for j in range(11))
    np.testing.assert_allclose(total, 1.0, atol=1e-12)
    plateau = np.linspace(4.0 / 3.0, 1.5, 101)
    np.testing.assert_allclose(phi(plateau), 1.0, atol=1e-12)


def test_dyadic_band() -> None:
    partition = DyadicPartition.for_size(32)
    assert (partition.j_min, partition.j_max) == (-2, 2)
    assert list(partition.indices) == [-2, -1, 0, 1, 2]
    with pytest.raises(DomainError):
        partition.check(3)


def test_blocks_reconstruct_the_field(rng: np.random.Generator) -> None:
    field = CartesianField3D([rng.standard_normal((N, N, N)) for _ in range(3)], L)
    pieces = decompose(field)
    assert sorted(pieces.blocks) == list(DyadicPartition.for_size(N).indices)
    assert (pieces.reconstruct() - field).lp_norm(math.inf) <= 1e-10


@pytest.mark.parametrize("j", [0, 1])
@pytest.mark.parametrize(("s", "p", "r"), [(1.0, math.inf, 1.0), (-1.0, math.inf, 1.0), (0.5, 2.0, 2.0)])
def test_single_tone_besov_norm(j: int, s: float, p: float, r: float) -> None:
    u = tone(j)
    expected = 2.0 ** (j * s) * u.lp_norm(p)
    assert besov_norm(u, s, p, r) == pytest.approx(expected, rel=1e-10)
    physical = (2.0**j * 2.0 * math.pi / L) ** s * u.lp_norm(p)
    assert besov_norm(u, s, p, r, physical=True) == pytest.approx(physical, rel=1e-10)


def test_besov_norm_rejects_small_exponents() -> None:
    with pytest.raises(DomainError):
        besov_norm(tone(0), 0.0, 0.5, 1.0)


def test_besov_report_carries_the_truncated_energy(rng: np.random.Generator) -> None:
    inside = besov_report(tone(0), 1.0, math.inf, 1.0)
    assert inside.value == pytest.approx(besov_norm(tone(0), 1.0, math.inf, 1.0))
    assert inside.truncated_fraction <= 1e-24
    constant = CartesianField3D.scalar(np.full((N, N, N), 2.0), L)
    assert truncated_fraction(constant) == pytest.approx(1.0)
    assert besov_report(constant, 1.0, math.inf, 1.0).value <= 1e-12
    noise = CartesianField3D.scalar(rng.standard_normal((N, N, N)), L)
    assert 0.0 < truncated_fraction(noise) < 1.0
    assert truncated_fraction(CartesianField3D.scalar(np.zeros((N, N, N)), L)) == 0.0


def test_leray_projection(smooth_vector: CartesianField3D) -> None:
    projected = leray_project(smooth_vector)
    scale = smooth_vector.lp_norm(math.inf)
    assert (leray_project(projected) - projected).lp_norm(math.inf) <= 1e-12 * scale
    assert spectral_divergence(projected).lp_norm(math.inf) <= 1e-12 * scale * N
    x1, x2, _ = coordinates()
    potential = spectral_gradient(CartesianField3D.scalar(np.sin(x1) * np.cos(2.0 * x2), L))
    assert leray_project(potential).lp_norm(math.inf) <= 1e-12 * potential.lp_norm(math.inf)


def test_vector_and_scalar_contracts() -> None:
    scalar = tone(0)
    vector = CartesianField3D([scalar.components[0]] * 3, L)
    with pytest.raises(ContractError):
        spectral_divergence(scalar)
    with pytest.raises(ContractError):
        leray_project(scalar)
    with pytest.raises(ContractError):
        spectral_gradient(vector)


def test_heat_semigroup_decays_a_tone() -> None:
    u = tone(0)
    # lattice wavevector (1, 1, 0) on a 2 pi box decays at rate 2
    assert heat_semigroup(u, 0.3).lp_norm(math.inf) == pytest.approx(math.exp(-0.6), rel=1e-12)
    assert (heat_semigroup(u, 0.0) - u).lp_norm(math.inf) <= 1e-14
    with pytest.raises(DomainError):
        heat_semigroup(u, -0.1)


@pytest.mark.parametrize("j", [0, 1])
def test_heat_decay_fit_of_a_tone(j: int) -> None:
    fit = heat_decay_fit(tone(j), j, (0.05, 0.1, 0.2, 0.4))
    assert fit.c == pytest.approx(2.0, rel=1e-9)
    assert fit.c >= 9.0 / 16.0
    assert fit.C == pytest.approx(1.0, rel=1e-9)


def test_heat_decay_fit_needs_data() -> None:
    with pytest.raises(DomainError):
        heat_decay_fit(tone(0), 0, (0.1,))
    with pytest.raises(DomainError):
        heat_decay_fit(CartesianField3D.scalar(np.zeros((N, N, N)), L), 0, (0.1, 0.2))


def test_bernstein_ratios_of_a_tone() -> None:
    report = bernstein_check(tone(0), 0, 2.0, 2.0, 1)
    assert report.upper == pytest.approx(math.sqrt(2.0), rel=1e-10)
    assert report.lower == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-10)


def test_bernstein_rejects_bad_input(rng: np.random.Generator) -> None:
    with pytest.raises(ContractError):
        bernstein_check(CartesianField3D.scalar(rng.standard_normal((N, N, N)), L), 0, 2.0, 2.0, 1)
    with pytest.raises(DomainError):
        bernstein_check(tone(0), 0, 4.0, 2.0, 1)
    with pytest.raises(DomainError):
        bernstein_check(tone(0), 0, 2.0, 2.0, -1)


def test_mihlin_ratio_of_an_empty_block() -> None:
    assert mihlin_ratio(CartesianField3D([np.zeros((N, N, N))] * 3, L), 0) == 0.0


def test_duhamel_without_forcing_is_the_heat_flow(smooth_vector: CartesianField3D) -> None:
    zero = CartesianField3D([np.zeros((N, N, N))] * 3, L)
    times = list(np.linspace(0.0, 1.0, 9))
    assert duhamel_residual(smooth_vector, [zero] * len(times), times, 0) <= 1e-12
    with pytest.raises(DomainError):
        duhamel_integral(smooth_vector, [zero], [0.0, 1.0], 0)
    with pytest.raises(DomainError):
        duhamel_integral(smooth_vector, [zero, zero], [1.0, 1.0], 0)
    with pytest.raises(DomainError):
        duhamel_integral(smooth_vector, [zero, zero], [0.0, 1.0], 5)


def test_heat_flow_with_constant_forcing_on_a_tone() -> None:
    forcing = tone(0)
    zero = CartesianField3D.scalar(np.zeros((N, N, N)), L)
    result = heat_flow_exact(zero, [forcing, forcing], [0.0, 0.5])
    # |xi|^2 = 2: u(t) = -(1 - e^{-2t}) / 2 F
    expected = -(1.0 - math.exp(-1.0)) / 2.0 * forcing.components[0]
    np.testing.assert_allclose(result.components[0], expected, atol=1e-12)


def test_embed_scalar_of_a_compact_bump(bump_state) -> None:
    f = bump_state.u_theta
    embedded = embed_scalar(f, 16, 16.0)
    assert embedded.N == 16
    assert not embedded.is_vector
    assert 0.0 < embedded.lp_norm(math.inf) <= f.max_abs() * (1.0 + 1e-12)


def test_embedding_contracts(grid: Grid, bump_state) -> None:
    constant = grid.sample(lambda r, z: 1.0 + 0.0 * r * z, Parity.EVEN)
    with pytest.raises(DomainError):
        embed_scalar(constant, 16, 16.0)
    with pytest.raises(DomainError):
        embed_scalar(bump_state.u_theta, 16, 8.0)
    f = bump_state.u_theta
    with pytest.raises(ContractError):
        embed_axisymmetric(f, f, grid.refined().zeros(Parity.EVEN), 16, 16.0)


def test_embedded_velocity_is_a_finite_vector(bump_state) -> None:
    embedded = embed_velocity(bump_state.velocity(), 16, 16.0)
    assert embedded.is_vector
    assert math.isfinite(embedded.lp_norm(math.inf))


def test_cartesian_field_contracts() -> None:
    with pytest.raises(ContractError):
        CartesianField3D.scalar(np.zeros((12, 12, 12)), L)
    with pytest.raises(ContractError):
        CartesianField3D([np.zeros((N, N, N))] * 2, L)
    with pytest.raises(ContractError):
        CartesianField3D.scalar(np.zeros((N, N, 8)), L)
    with pytest.raises(DomainError):
        CartesianField3D.scalar(np.zeros((N, N, N)), 0.0)
    field = tone(0)
    with pytest.raises(ValueError, match="read-only"):
        field.components[0][0, 0, 0] = 1.0


def test_dyadic_block_isolates_a_tone() -> None:
    u = tone(0)
    assert (dyadic_block(u, 0) - u).lp_norm(math.inf) <= 1e-12
    assert dyadic_block(u, 1).lp_norm(math.inf) <= 1e-12
    with pytest.raises(DomainError):
        dyadic_block(u, 2)
