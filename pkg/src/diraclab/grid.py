"""Periodic 2D grid and two-component spinor fields.

Discretization of the plane by a square torus of side ``box_length`` with
``n`` points per axis.  The frequency lattice is

    xi = (2*pi / box_length) * k,   k in {-n/2, ..., n/2 - 1}^2,

stored in numpy fft ordering.  Frequency-space data is kept as Fourier
*coefficients* c_k (a single mode ``exp(i xi_k . x)`` has coefficient 1),
so Parseval reads

    ||f||_{L^2}^2 = (L/n)^2 sum_x |f(x)|^2 = L^2 sum_k |c_k|^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PHYSICAL = "physical"
FREQUENCY = "frequency"


class GridMismatchError(ValueError):
    """Two fields or operators do not live on the same grid."""


@dataclass(frozen=True)
class Grid2D:
    """N x N torus with physical period ``box_length``."""

    n: int
    box_length: float = 2.0 * np.pi

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ValueError(f"n must be even and >= 4, got {self.n}")
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length}")

    @property
    def dx(self):
        return self.box_length / self.n

    @property
    def cell_area(self):
        return self.dx**2

    def k_lattice(self):
        """Integer mode indices along one axis, fft-ordered."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n).astype(np.int64)

    def xi_axes(self):
        """Frequency values along one axis, fft-ordered."""
        return (2.0 * np.pi / self.box_length) * self.k_lattice()

    def xi_mesh(self):
        """(xi1, xi2) meshgrids, each of shape (n, n)."""
        xi = self.xi_axes()
        return np.meshgrid(xi, xi, indexing="ij")

    def xi_norm(self):
        """|xi| on the full lattice, shape (n, n)."""
        x1, x2 = self.xi_mesh()
        return np.hypot(x1, x2)

    def x_axes(self):
        return np.arange(self.n) * self.dx

    def x_mesh(self):
        x = self.x_axes()
        return np.meshgrid(x, x, indexing="ij")


def _check_same_grid(a: Grid2D, b: Grid2D):
    if a != b:
        raise GridMismatchError(f"grid mismatch: {a} vs {b}")


@dataclass
class SpinorField:
    """Two-component complex field psi = (psi1, psi2) on a Grid2D.

    ``data`` has shape (2, n, n); ``rep`` tags whether it holds samples on
    the spatial lattice or Fourier coefficients.
    """

    grid: Grid2D
    data: np.ndarray
    rep: str = PHYSICAL

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.complex128)
        if self.data.shape != (2, self.grid.n, self.grid.n):
            raise ValueError(
                f"expected data shape (2, {self.grid.n}, {self.grid.n}), "
                f"got {self.data.shape}"
            )
        if self.rep not in (PHYSICAL, FREQUENCY):
            raise ValueError(f"unknown representation tag {self.rep!r}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, grid: Grid2D, rep: str = PHYSICAL) -> "SpinorField":
        return cls(grid, np.zeros((2, grid.n, grid.n), dtype=np.complex128), rep)

    @classmethod
    def from_components(cls, grid: Grid2D, c1, c2, rep: str = PHYSICAL) -> "SpinorField":
        data = np.stack([np.asarray(c1, dtype=np.complex128),
                         np.asarray(c2, dtype=np.complex128)])
        return cls(grid, data, rep)

    @classmethod
    def random(cls, grid: Grid2D, rng=None, rep: str = PHYSICAL) -> "SpinorField":
        """Unit-variance complex Gaussian field, for randomized identity checks."""
        rng = np.random.default_rng(rng)
        shape = (2, grid.n, grid.n)
        data = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return cls(grid, data, rep)

    # -- representation changes -------------------------------------------

    def to_frequency(self) -> "SpinorField":
        if self.rep == FREQUENCY:
            return self
        coeff = np.fft.fft2(self.data, axes=(-2, -1)) / self.grid.n**2
        return SpinorField(self.grid, coeff, FREQUENCY)

    def to_physical(self) -> "SpinorField":
        if self.rep == PHYSICAL:
            return self
        samples = np.fft.ifft2(self.data, axes=(-2, -1)) * self.grid.n**2
        return SpinorField(self.grid, samples, PHYSICAL)

    def with_data(self, data, rep=None) -> "SpinorField":
        return SpinorField(self.grid, data, self.rep if rep is None else rep)

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "SpinorField") -> "SpinorField":
        _check_same_grid(self.grid, other.grid)
        if self.rep != other.rep:
            other = other.to_physical() if self.rep == PHYSICAL else other.to_frequency()
        return self.with_data(self.data + other.data)

    def __sub__(self, other: "SpinorField") -> "SpinorField":
        _check_same_grid(self.grid, other.grid)
        if self.rep != other.rep:
            other = other.to_physical() if self.rep == PHYSICAL else other.to_frequency()
        return self.with_data(self.data - other.data)

    def __mul__(self, scalar) -> "SpinorField":
        return self.with_data(self.data * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpinorField":
        return self.with_data(-self.data)

    def copy(self) -> "SpinorField":
        return SpinorField(self.grid, self.data.copy(), self.rep)

    # -- norms -------------------------------------------------------------

    def l2_norm(self) -> float:
        """Torus L^2 norm, sqrt(integral |psi1|^2 + |psi2|^2 dx)."""
        if self.rep == PHYSICAL:
            return float(np.sqrt(self.grid.cell_area * np.sum(np.abs(self.data) ** 2)))
        return float(self.grid.box_length * np.sqrt(np.sum(np.abs(self.data) ** 2)))

    def inner(self, other: "SpinorField") -> complex:
        """L^2 inner product <self, other> = integral self^dagger other dx."""
        _check_same_grid(self.grid, other.grid)
        a = self.to_physical().data
        b = other.to_physical().data
        return complex(self.grid.cell_area * np.sum(np.conj(a) * b))
