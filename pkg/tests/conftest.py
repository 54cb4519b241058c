"""Shared helpers for the test suite."""

import numpy as np
import pytest

from diraclab.grid import FREQUENCY, Grid2D, SpinorField


def random_field(grid, seed, mean_zero=False, rep=None):
    """Unit-variance complex Gaussian spinor; optionally with zero mean."""
    f = SpinorField.random(grid, np.random.default_rng(seed))
    if mean_zero:
        c = f.to_frequency().data.copy()
        c[:, 0, 0] = 0.0
        f = SpinorField(grid, c, FREQUENCY)
    if rep == "physical":
        f = f.to_physical()
    return f


def band_limited_field(grid, radius, seed, mean_zero=False):
    """Random spinor with all modes outside |xi| <= radius removed."""
    f = random_field(grid, seed, mean_zero=mean_zero)
    c = f.to_frequency().data * (grid.xi_norm() <= radius)[None, :, :]
    return SpinorField(grid, c, FREQUENCY)


@pytest.fixture
def grid32():
    return Grid2D(32)


@pytest.fixture
def grid16():
    return Grid2D(16)
