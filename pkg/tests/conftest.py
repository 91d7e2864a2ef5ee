from __future__ import annotations

from collections.abc import Callable
from fractions import Fraction

import numpy as np
import pytest

from swirlmhd.evolve.initial import Amplitudes, BumpProfile, primitive_bump_state
from swirlmhd.evolve.state import AxiState
from swirlmhd.exponents import ExponentSet, exponent_set
from swirlmhd.grid import Grid, Parity, ScalarField


@pytest.fixture
def grid() -> Grid:
    return Grid(Nr=32, Nz=32, Rmax=4.0, Lz=8.0)


@pytest.fixture
def exps() -> ExponentSet:
    return exponent_set(Fraction(51, 50))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def bump_state(grid: Grid) -> AxiState:
    return primitive_bump_state(grid, BumpProfile.from_fractions(grid), Amplitudes(0.2, 0.2, 0.5))


@pytest.fixture
def random_odd(grid: Grid, rng: np.random.Generator) -> Callable[[], ScalarField]:
    """Factory of rough odd fields that vanish near Rmax."""

    def make() -> ScalarField:
        r, _ = grid.mesh()
        return ScalarField(grid, rng.standard_normal(grid.shape) * r * np.exp(-(r**2)), Parity.ODD, "f")

    return make
