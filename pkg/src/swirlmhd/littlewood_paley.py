"""Littlewood-Paley analysis on a periodic 3D box.

Frequencies are measured in lattice units tau = |k| with k the integer FFT wavenumber, so the
physical frequency is 2 pi tau / L. Dyadic block j keeps tau in [3/4, 8/3] * 2^j.
"""

from __future__ import annotations

import math
import threading
from collections.abc import Sequence
from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING

import numpy as np
from scipy import fft
from scipy.interpolate import RegularGridInterpolator
from scipy.special import expit

from .exceptions import ContractError, DomainError
from .grid import FloatArray, Grid, ScalarField

if TYPE_CHECKING:
    from .evolve.state import VelocityField

__all__ = [
    "BernsteinReport",
    "BesovReport",
    "CartesianField3D",
    "Decomposition",
    "DyadicPartition",
    "HeatFit",
    "bernstein_check",
    "besov_norm",
    "besov_report",
    "chi",
    "decompose",
    "duhamel_integral",
    "duhamel_residual",
    "dyadic_block",
    "embed_axisymmetric",
    "embed_scalar",
    "embed_velocity",
    "heat_decay_fit",
    "heat_flow_exact",
    "heat_semigroup",
    "leray_project",
    "mihlin_ratio",
    "phi",
    "smooth_step",
    "spectral_divergence",
    "spectral_gradient",
    "truncated_fraction",
]

SUPPORT_TOLERANCE = 1e-6
LOCALIZATION_TOLERANCE = 1e-10


def smooth_step(x: FloatArray) -> FloatArray:
    """C-infinity transition: 0 for x <= 0, 1 for x >= 1, g(x)/(g(x) + g(1-x)) with g(x) = exp(-1/x) between."""
    x = np.asarray(x, dtype=np.float64)
    inside = (x > 0.0) & (x < 1.0)
    safe = np.where(inside, x, 0.5)
    value = expit(1.0 / (1.0 - safe) - 1.0 / safe)
    return np.where(inside, value, np.where(x >= 1.0, 1.0, 0.0))


def chi(tau: FloatArray) -> FloatArray:
    """Low-pass profile: 1 on [0, 3/4], 0 from 4/3 on."""
    return 1.0 - smooth_step((np.asarray(tau, dtype=np.float64) - 0.75) / (7.0 / 12.0))


def phi(tau: FloatArray) -> FloatArray:
    """Annulus profile chi(tau/2) - chi(tau): supported in [3/4, 8/3] and equal to 1 on [4/3, 3/2]."""
    tau = np.asarray(tau, dtype=np.float64)
    return chi(tau / 2.0) - chi(tau)


@dataclass(frozen=True, slots=True)
class DyadicPartition:
    """The resolvable band [j_min, j_max] = [-2, log2(N/8)] for an N^3 box."""

    j_min: int
    j_max: int

    @classmethod
    def for_size(cls, N: int) -> DyadicPartition:
        return cls(-2, int(round(math.log2(N / 8))))

    @property
    def indices(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def check(self, j: int) -> None:
        if not self.j_min <= j <= self.j_max:
            raise DomainError.out_of_range("j", j, f"[{self.j_min}, {self.j_max}]")

    def block_multiplier(self, tau: FloatArray, j: int) -> FloatArray:
        return phi(tau * 2.0**-j)

    def low_multiplier(self, tau: FloatArray) -> FloatArray:
        return chi(tau * 2.0**-self.j_min)

    def tail_multiplier(self, tau: FloatArray) -> FloatArray:
        return 1.0 - chi(tau * 2.0 ** -(self.j_max + 1))


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


class CartesianField3D:
    """Scalar or 3-vector field sampled on an N^3 periodic box of side L.

    The rfft spectrum is computed lazily, once, under a lock.
    """

    __slots__ = ("L", "N", "_lock", "_spectrum", "components")

    def __init__(self, components: Sequence[FloatArray], L: float) -> None:
        arrays = tuple(np.array(c, dtype=np.float64) for c in components)
        if len(arrays) not in (1, 3):
            raise ContractError(f"a field has 1 or 3 components, got {len(arrays)}")
        N = arrays[0].shape[0]
        for array in arrays:
            if array.shape != (N, N, N):
                raise ContractError(f"component shape {array.shape} is not a cube of side {N}")
            array.flags.writeable = False
        if not _is_power_of_two(N):
            raise ContractError(f"box size N={N} must be a power of two")
        if not L > 0:
            raise DomainError.out_of_range("L", L, "]0, inf[")
        self.components = arrays
        self.N = N
        self.L = float(L)
        self._spectrum: tuple[np.ndarray, ...] | None = None
        self._lock = threading.Lock()

    @classmethod
    def scalar(cls, values: FloatArray, L: float) -> CartesianField3D:
        return cls((values,), L)

    @classmethod
    def from_spectrum(cls, spectra: Sequence[np.ndarray], N: int, L: float) -> CartesianField3D:
        values = [fft.irfftn(s, s=(N, N, N), axes=(0, 1, 2)) for s in spectra]
        field = cls(values, L)
        return field

    @property
    def is_vector(self) -> bool:
        return len(self.components) == 3

    @property
    def cell_volume(self) -> float:
        return (self.L / self.N) ** 3

    def spectrum(self) -> tuple[np.ndarray, ...]:
        with self._lock:
            if self._spectrum is None:
                self._spectrum = tuple(fft.rfftn(c, axes=(0, 1, 2)) for c in self.components)
            return self._spectrum

    def magnitude(self) -> FloatArray:
        if not self.is_vector:
            return np.abs(self.components[0])
        return np.sqrt(sum(c**2 for c in self.components))

    def lp_norm(self, p: float) -> float:
        """Torus L^p norm of the pointwise (Euclidean) magnitude."""
        magnitude = self.magnitude()
        if math.isinf(p):
            return float(np.max(magnitude))
        return float(np.sum(magnitude**p) * self.cell_volume) ** (1.0 / p)

    def apply(self, multiplier: FloatArray) -> CartesianField3D:
        """Same multiplier on every component."""
        return CartesianField3D.from_spectrum([multiplier * s for s in self.spectrum()], self.N, self.L)

    def __sub__(self, other: CartesianField3D) -> CartesianField3D:
        return CartesianField3D([a - b for a, b in zip(self.components, other.components, strict=True)], self.L)

    def __add__(self, other: CartesianField3D) -> CartesianField3D:
        return CartesianField3D([a + b for a, b in zip(self.components, other.components, strict=True)], self.L)


def _lattice(N: int) -> tuple[FloatArray, FloatArray, FloatArray]:
    k_full = fft.fftfreq(N, 1.0 / N)
    k_half = fft.rfftfreq(N, 1.0 / N)
    return np.meshgrid(k_full, k_full, k_half, indexing="ij")


def _tau(N: int) -> FloatArray:
    kx, ky, kz = _lattice(N)
    return np.sqrt(kx**2 + ky**2 + kz**2)


def _odd_wavenumbers(N: int, L: float) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Physical wavenumbers for odd-order derivatives, with the Nyquist component zeroed."""
    scale = 2.0 * math.pi / L
    out = []
    for k in _lattice(N):
        k = k.copy()
        k[np.abs(k) == N // 2] = 0.0
        out.append(scale * k)
    return out[0], out[1], out[2]


def decompose(u: CartesianField3D) -> Decomposition:
    partition = DyadicPartition.for_size(u.N)
    tau = _tau(u.N)
    return Decomposition(
        low=u.apply(partition.low_multiplier(tau)),
        blocks={j: u.apply(partition.block_multiplier(tau, j)) for j in partition.indices},
        tail=u.apply(partition.tail_multiplier(tau)),
    )


@dataclass(frozen=True, slots=True, eq=False)
class Decomposition:
    low: CartesianField3D
    blocks: dict[int, CartesianField3D]
    tail: CartesianField3D

    def reconstruct(self) -> CartesianField3D:
        total = self.low
        for block in self.blocks.values():
            total = total + block
        return total + self.tail


def dyadic_block(u: CartesianField3D, j: int) -> CartesianField3D:
    partition = DyadicPartition.for_size(u.N)
    partition.check(j)
    return u.apply(partition.block_multiplier(_tau(u.N), j))


def _block_weight(j: int, s: float, L: float, physical: bool) -> float:
    frequency = 2.0**j * (2.0 * math.pi / L if physical else 1.0)
    return frequency**s


def besov_norm(u: CartesianField3D, s: float, p: float, r_sum: float, *, physical: bool = False) -> float:
    """Truncated ||(w_j ||Delta_j u||_p)_j||_{l^r} over the resolvable band.

    ``w_j = 2^{js}`` in lattice units, or ``(2^j 2 pi / L)^s`` with ``physical=True``.
    """
    if not (p >= 1 and r_sum >= 1):
        raise DomainError.out_of_range("(p, r)", (p, r_sum), "[1, inf]^2")
    partition = DyadicPartition.for_size(u.N)
    tau = _tau(u.N)
    terms = np.array([
        _block_weight(j, s, u.L, physical) * u.apply(partition.block_multiplier(tau, j)).lp_norm(p)
        for j in partition.indices
    ])
    if math.isinf(r_sum):
        return float(np.max(terms))
    return float(np.sum(terms**r_sum) ** (1.0 / r_sum))


@dataclass(frozen=True, slots=True)
class BesovReport:
    """A truncated Besov norm with the share of the energy of ``u`` left outside the band."""

    value: float
    truncated_fraction: float


def truncated_fraction(u: CartesianField3D) -> float:
    """||(S_low + tail) u||_2^2 / ||u||_2^2: energy the band [j_min, j_max] never sees."""
    total = u.lp_norm(2.0)
    if total == 0.0:
        return 0.0
    partition = DyadicPartition.for_size(u.N)
    tau = _tau(u.N)
    outside = u.apply(partition.low_multiplier(tau) + partition.tail_multiplier(tau))
    return (outside.lp_norm(2.0) / total) ** 2


def besov_report(u: CartesianField3D, s: float, p: float, r_sum: float, *, physical: bool = False) -> BesovReport:
    return BesovReport(
        value=besov_norm(u, s, p, r_sum, physical=physical),
        truncated_fraction=truncated_fraction(u),
    )


def spectral_divergence(u: CartesianField3D) -> CartesianField3D:
    if not u.is_vector:
        raise ContractError("divergence needs a vector field")
    xi = _odd_wavenumbers(u.N, u.L)
    spectrum = sum(1j * k * s for k, s in zip(xi, u.spectrum(), strict=True))
    return CartesianField3D.from_spectrum([spectrum], u.N, u.L)


def spectral_gradient(g: CartesianField3D) -> CartesianField3D:
    if g.is_vector:
        raise ContractError("gradient needs a scalar field")
    (spectrum,) = g.spectrum()
    return CartesianField3D.from_spectrum([1j * k * spectrum for k in _odd_wavenumbers(g.N, g.L)], g.N, g.L)


def leray_project(u: CartesianField3D) -> CartesianField3D:
    """(Id - xi xi^T / |xi|^2) per mode; modes with xi = 0 are left untouched."""
    if not u.is_vector:
        raise ContractError("the Leray projector acts on vector fields")
    xi = _odd_wavenumbers(u.N, u.L)
    norm2 = sum(k**2 for k in xi)
    safe = np.where(norm2 > 0.0, norm2, 1.0)
    spectra = u.spectrum()
    dot = sum(k * s for k, s in zip(xi, spectra, strict=True)) / safe
    projected = [s - np.where(norm2 > 0.0, k * dot, 0.0) for k, s in zip(xi, spectra, strict=True)]
    return CartesianField3D.from_spectrum(projected, u.N, u.L)


def _heat_rate(N: int, L: float) -> FloatArray:
    return (2.0 * math.pi / L) ** 2 * _tau(N) ** 2


def heat_semigroup(u: CartesianField3D, t: float) -> CartesianField3D:
    if t < 0:
        raise DomainError.out_of_range("t", t, "[0, inf[")
    return u.apply(np.exp(-t * _heat_rate(u.N, u.L)))


@dataclass(frozen=True, slots=True)
class HeatFit:
    """Fit of ||e^{t Delta} u||_inf / ||u||_inf = C exp(-c t lambda^2), lambda = 2^j 2 pi / L."""

    c: float
    C: float


def heat_decay_fit(u: CartesianField3D, j: int, times: Sequence[float]) -> HeatFit:
    if len(times) < 2:
        raise DomainError("heat decay fit needs at least two times", {"times": len(times)})
    reference = u.lp_norm(math.inf)
    if reference == 0.0:
        raise DomainError("heat decay fit of a zero field", None)
    lam2 = (2.0**j * 2.0 * math.pi / u.L) ** 2
    x = np.array([t * lam2 for t in times])
    y = np.log([heat_semigroup(u, t).lp_norm(math.inf) / reference for t in times])
    slope, intercept = np.polyfit(x, y, 1)
    return HeatFit(c=float(-slope), C=float(np.exp(intercept)))


def mihlin_ratio(u: CartesianField3D, j: int) -> float:
    """||P Delta_j u||_inf / ||Delta_j u||_inf."""
    block = dyadic_block(u, j)
    denominator = block.lp_norm(math.inf)
    if denominator == 0.0:
        return 0.0
    return leray_project(block).lp_norm(math.inf) / denominator


@dataclass(frozen=True, slots=True)
class BernsteinReport:
    """``upper`` = ||D^N u||_q / (lambda^{N + 3(1/p - 1/q)} ||u||_p); ``lower`` = lambda^N ||u||_p / ||D^N u||_p."""

    upper: float
    lower: float


def _derivative_tensor_magnitude(u: CartesianField3D, order: int) -> FloatArray:
    xi = _odd_wavenumbers(u.N, u.L)
    total = np.zeros((u.N, u.N, u.N))
    for spectrum in u.spectrum():
        for indices in product(range(3), repeat=order):
            symbol = np.ones_like(xi[0], dtype=np.complex128)
            for i in indices:
                symbol = symbol * (1j * xi[i])
            total += fft.irfftn(symbol * spectrum, s=(u.N, u.N, u.N), axes=(0, 1, 2)) ** 2
    return np.sqrt(total)


def bernstein_check(u: CartesianField3D, j: int, p: float, q: float, N_deriv: int) -> BernsteinReport:
    if not 1 <= p <= q:
        raise DomainError.out_of_range("(p, q)", (p, q), "1 <= p <= q <= inf")
    if N_deriv < 0:
        raise DomainError.negative("N_deriv", N_deriv)
    tau = _tau(u.N)
    outside = (tau < 0.75 * 2.0**j) | (tau > (8.0 / 3.0) * 2.0**j)
    energy = sum(float(np.sum(np.abs(s) ** 2)) for s in u.spectrum())
    leaked = sum(float(np.sum(np.abs(s[outside]) ** 2)) for s in u.spectrum())
    if energy == 0.0 or leaked > LOCALIZATION_TOLERANCE * energy:
        raise ContractError(f"field is not spectrally localized in block {j}", {"leaked": leaked, "energy": energy})
    lam = 2.0**j * 2.0 * math.pi / u.L
    magnitude = _derivative_tensor_magnitude(u, N_deriv) if N_deriv else u.magnitude()
    derivative = CartesianField3D.scalar(magnitude, u.L)
    norm_p = u.lp_norm(p)
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    upper = derivative.lp_norm(q) / (lam ** (N_deriv + 3.0 * (1.0 / p - inv_q)) * norm_p)
    lower = lam**N_deriv * norm_p / derivative.lp_norm(p)
    return BernsteinReport(upper=upper, lower=lower)


def _phi1(x: FloatArray) -> FloatArray:
    small = np.abs(x) < 1e-2
    safe = np.where(small, 1.0, x)
    series = 1.0 - x / 2.0 + x**2 / 6.0 - x**3 / 24.0 + x**4 / 120.0
    return np.where(small, series, -np.expm1(-safe) / safe)


def _phi2(x: FloatArray) -> FloatArray:
    small = np.abs(x) < 1e-2
    safe = np.where(small, 1.0, x)
    series = 0.5 - x / 6.0 + x**2 / 24.0 - x**3 / 120.0 + x**4 / 720.0
    return np.where(small, series, (safe + np.expm1(-safe)) / safe**2)


def _check_samples(forcing: Sequence[CartesianField3D], times: Sequence[float]) -> None:
    if len(forcing) != len(times) or len(times) < 2:
        raise DomainError("forcing samples and times must match and number at least two", None)
    if np.any(np.diff(np.asarray(times, dtype=np.float64)) <= 0.0):
        raise DomainError("forcing sample times must be strictly increasing", None)


def heat_flow_exact(u0: CartesianField3D, forcing: Sequence[CartesianField3D], times: Sequence[float]) -> CartesianField3D:
    """Solution at ``times[-1]`` of u' = Delta u - P F with F linear in time between samples.

    Each Fourier mode is advanced exactly by the exponential integrator
    y <- e^{-x} y - h (phi1(x) F_n + phi2(x) (F_{n+1} - F_n)), x = h |xi|^2.
    """
    _check_samples(forcing, times)
    rate = _heat_rate(u0.N, u0.L)
    state = [s.copy() for s in u0.spectrum()]
    projected = [leray_project(f).spectrum() if f.is_vector else f.spectrum() for f in forcing]
    for n in range(len(times) - 1):
        h = times[n + 1] - times[n]
        x = h * rate
        decay, w1, w2 = np.exp(-x), h * _phi1(x), h * _phi2(x)
        state = [
            decay * y - (w1 * f0 + w2 * (f1 - f0))
            for y, f0, f1 in zip(state, projected[n], projected[n + 1], strict=True)
        ]
    return CartesianField3D.from_spectrum(state, u0.N, u0.L)


def duhamel_integral(
    u0: CartesianField3D, forcing: Sequence[CartesianField3D], times: Sequence[float], j: int
) -> CartesianField3D:
    """e^{t Delta} Delta_j u0 - trapezoid_tau e^{(t - tau) Delta} P Delta_j F(tau), t = times[-1]."""
    _check_samples(forcing, times)
    partition = DyadicPartition.for_size(u0.N)
    partition.check(j)
    tau_lattice = _tau(u0.N)
    block = partition.block_multiplier(tau_lattice, j)
    rate = _heat_rate(u0.N, u0.L)
    t = times[-1] - times[0]
    result = [np.exp(-t * rate) * block * s for s in u0.spectrum()]
    weights = np.zeros(len(times))
    steps = np.diff(np.asarray(times, dtype=np.float64))
    weights[:-1] += 0.5 * steps
    weights[1:] += 0.5 * steps
    for weight, sample_time, f in zip(weights, times, forcing, strict=True):
        projected = leray_project(f).spectrum() if f.is_vector else f.spectrum()
        kernel = weight * np.exp(-(times[-1] - sample_time) * rate) * block
        result = [r - kernel * s for r, s in zip(result, projected, strict=True)]
    return CartesianField3D.from_spectrum(result, u0.N, u0.L)


def duhamel_residual(
    u0: CartesianField3D, forcing: Sequence[CartesianField3D], times: Sequence[float], j: int
) -> float:
    """||Delta_j u(t) - Duhamel formula||_inf with u the exact forced heat flow."""
    exact = dyadic_block(heat_flow_exact(u0, forcing, times), j)
    return (exact - duhamel_integral(u0, forcing, times, j)).lp_norm(math.inf)


def _box_coordinates(N: int, L: float) -> FloatArray:
    return -0.5 * L + np.arange(N) * (L / N)


def _interpolator(f: ScalarField) -> RegularGridInterpolator:
    grid = f.grid
    r_nodes = np.concatenate([[-0.5 * grid.dr], grid.r_centers, [grid.Rmax]])
    z_nodes = np.concatenate([[-0.5 * grid.dz], grid.z_centers, [grid.Lz + 0.5 * grid.dz]])
    values = np.zeros((grid.Nr + 2, grid.Nz + 2))
    values[1:-1, 1:-1] = f.values
    values[0, 1:-1] = f.parity.sign * f.values[0]
    values[:, 0] = values[:, -2]
    values[:, -1] = values[:, 1]
    return RegularGridInterpolator((r_nodes, z_nodes), values, method="linear", bounds_error=False, fill_value=0.0)


def _check_support(grid: Grid, fields: Sequence[ScalarField]) -> None:
    peak = max(f.max_abs() for f in fields)
    if peak == 0.0:
        return
    for f in fields:
        band = np.concatenate([f.values[-1], f.values[:, 0], f.values[:, -1]])
        if float(np.max(np.abs(band))) > SUPPORT_TOLERANCE * peak:
            raise DomainError(f"{f.name or 'field'} has support on the boundary of the (r, z) domain", None)


def _check_box(grid: Grid, L: float) -> None:
    if L < 2.0 * max(grid.Rmax, grid.Lz):
        raise DomainError.out_of_range("L", L, f"[{2.0 * max(grid.Rmax, grid.Lz)}, inf[")


def _sample_points(grid: Grid, N: int, L: float) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
    x = _box_coordinates(N, L)
    x1, x2, x3 = np.meshgrid(x, x, x, indexing="ij")
    r = np.hypot(x1, x2)
    z = x3 + 0.5 * grid.Lz
    return x1, x2, r, z


def embed_scalar(f: ScalarField, N: int, L: float) -> CartesianField3D:
    """Sample an axisymmetric scalar on the box [-L/2, L/2)^3 centred on the middle of the z period."""
    _check_box(f.grid, L)
    _check_support(f.grid, [f])
    _, _, r, z = _sample_points(f.grid, N, L)
    values = _interpolator(f)(np.stack([r.ravel(), z.ravel()], axis=-1)).reshape(r.shape)
    return CartesianField3D.scalar(values, L)


def embed_axisymmetric(
    f_r: ScalarField,
    f_theta: ScalarField,
    f_z: ScalarField,
    N: int,
    L: float,
    *,
    check_support: bool = True,
) -> CartesianField3D:
    """Cartesian components (f^r cos - f^theta sin, f^r sin + f^theta cos, f^z) of a swirl-basis field.

    With ``check_support=False`` whatever lies outside one z-period is cut off instead of rejected.
    """
    grid = f_r.grid
    if f_theta.grid != grid or f_z.grid != grid:
        raise ContractError.grid_mismatch("embed_axisymmetric")
    _check_box(grid, L)
    if check_support:
        _check_support(grid, [f_r, f_theta, f_z])
    x1, x2, r, z = _sample_points(grid, N, L)
    points = np.stack([r.ravel(), z.ravel()], axis=-1)
    radial, swirl, axial = (_interpolator(f)(points).reshape(r.shape) for f in (f_r, f_theta, f_z))
    on_axis = r == 0.0
    safe_r = np.where(on_axis, 1.0, r)
    v1 = np.where(on_axis, 0.0, (radial * x1 - swirl * x2) / safe_r)
    v2 = np.where(on_axis, 0.0, (radial * x2 + swirl * x1) / safe_r)
    return CartesianField3D((v1, v2, axial), L)


def embed_velocity(velocity: VelocityField, N: int, L: float) -> CartesianField3D:
    """Truncated embedding of a solver velocity; (u^r, u^z) are not compactly supported."""
    return embed_axisymmetric(velocity.u_r, velocity.u_theta, velocity.u_z, N, L, check_support=False)
