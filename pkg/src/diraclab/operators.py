"""Fourier multipliers, half-wave propagators, and Dirac projections.

Everything here acts diagonally in frequency.  The Dirac symbol is the
Hermitian 2x2 matrix

    alpha.xi = [[0,                conj(lam#) (xi1 - i xi2)],
                [lam# (xi1 + i xi2),                      0]]

with eigenvalues +-|lam#||xi|, so the half-wave projections are

    Pi^{+-}(xi) = (1/2) (I +- alpha.xi / (|lam#| |xi|)),

defined as (1/2) I at xi = 0 where the symbol direction degenerates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .grid import FREQUENCY, Grid2D, GridMismatchError, SpinorField
from .params import DiracParams

# ---------------------------------------------------------------------------
# generic multipliers
# ---------------------------------------------------------------------------


class MultiplierSpec:
    """Scalar Fourier multiplier m(xi) tabulated on a grid's lattice.

    ``symbol`` maps (xi1, xi2) meshgrids to complex values; symbols singular
    at the origin must declare ``zero_mode_value`` explicitly.
    """

    def __init__(self, grid: Grid2D, symbol: Callable, zero_mode_value=None):
        self.grid = grid
        x1, x2 = grid.xi_mesh()
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(symbol(x1, x2), dtype=np.complex128)
        if values.shape != x1.shape:
            values = np.broadcast_to(values, x1.shape).astype(np.complex128)
        values = values.copy()
        if zero_mode_value is not None:
            values[0, 0] = zero_mode_value
        if not np.all(np.isfinite(values)):
            raise ValueError(
                "multiplier symbol is not finite on the lattice "
                "(singular symbols need zero_mode_value)"
            )
        self.values = values
        self.zero_mode_value = values[0, 0]

    @classmethod
    def gradient_modulus(cls, grid: Grid2D, power: float = 1.0) -> "MultiplierSpec":
        """|xi|^power; negative powers get zero mode 0 (mean-zero convention)."""
        zero = 0.0 if power <= 0 else None
        return cls(grid, lambda x1, x2: np.hypot(x1, x2) ** power, zero_mode_value=zero)

    @classmethod
    def bessel(cls, grid: Grid2D, s: float) -> "MultiplierSpec":
        """<xi>^s = (1 + |xi|^2)^(s/2)."""
        return cls(grid, lambda x1, x2: (1.0 + x1**2 + x2**2) ** (s / 2.0))


def apply_multiplier(f: SpinorField, m: MultiplierSpec) -> SpinorField:
    """Multiply every Fourier mode of ``f`` by m(xi), preserving representation."""
    if f.grid != m.grid:
        raise GridMismatchError("field and multiplier live on different grids")
    was_physical = f.rep != FREQUENCY
    coeff = f.to_frequency().data * m.values
    out = SpinorField(f.grid, coeff, FREQUENCY)
    return out.to_physical() if was_physical else out


def apply_scalar_multiplier(grid: Grid2D, u: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Same as apply_multiplier for a bare (n, n) physical-space array."""
    coeff = np.fft.fft2(u) / grid.n**2
    return np.fft.ifft2(coeff * values) * grid.n**2


# ---------------------------------------------------------------------------
# half-wave propagator and Dirac algebra
# ---------------------------------------------------------------------------


def _check_sign(sign: int):
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")


def half_wave_propagate(f: SpinorField, t: float, sign: int) -> SpinorField:
    """Free half-wave flow S_{+-}(t) f = exp(-+ i t |grad|) f (an L^2 isometry)."""
    _check_sign(sign)
    if not np.isfinite(t):
        raise ValueError("propagation time must be finite")
    was_physical = f.rep != FREQUENCY
    phase = np.exp(-1j * sign * t * f.grid.xi_norm())
    out = SpinorField(f.grid, f.to_frequency().data * phase, FREQUENCY)
    return out.to_physical() if was_physical else out


def _projection_offdiag(grid: Grid2D, p: DiracParams) -> np.ndarray:
    """Unit symbol a(xi) = conj(lam#)(xi1 - i xi2) / (|lam#||xi|), a(0) = 0."""
    x1, x2 = grid.xi_mesh()
    r = np.hypot(x1, x2)
    a = np.zeros_like(x1, dtype=np.complex128)
    nz = r > 0
    a[nz] = np.conj(p.lambda_sharp) * (x1[nz] - 1j * x2[nz]) / (abs(p.lambda_sharp) * r[nz])
    return a


def dirac_projection(f: SpinorField, sign: int, p: DiracParams) -> SpinorField:
    """Spectral projection Pi^{+-}(D) onto the +-|lam#||xi| eigenspaces."""
    _check_sign(sign)
    was_physical = f.rep != FREQUENCY
    c = f.to_frequency().data
    a = _projection_offdiag(f.grid, p)
    out = np.empty_like(c)
    out[0] = 0.5 * (c[0] + sign * a * c[1])
    out[1] = 0.5 * (c[1] + sign * np.conj(a) * c[0])
    res = SpinorField(f.grid, out, FREQUENCY)
    return res.to_physical() if was_physical else res


def dirac_operator(f: SpinorField, p: DiracParams) -> SpinorField:
    """Apply alpha.D, the self-adjoint first-order Dirac operator."""
    was_physical = f.rep != FREQUENCY
    c = f.to_frequency().data
    x1, x2 = f.grid.xi_mesh()
    lam = p.lambda_sharp
    out = np.empty_like(c)
    out[0] = np.conj(lam) * (x1 - 1j * x2) * c[1]
    out[1] = lam * (x1 + 1j * x2) * c[0]
    res = SpinorField(f.grid, out, FREQUENCY)
    return res.to_physical() if was_physical else res


# ---------------------------------------------------------------------------
# frequency localization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Annulus:
    """Sharp dyadic shell: |xi| <= 1 for lam = 1, lam/2 < |xi| <= lam above."""

    lam: float

    def mask(self, grid: Grid2D) -> np.ndarray:
        if not self.lam > 0:
            raise ValueError("annulus scale must be positive")
        r = grid.xi_norm()
        if self.lam <= 1:
            return r <= self.lam
        return (r > self.lam / 2) & (r <= self.lam)


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def mask(self, grid: Grid2D) -> np.ndarray:
        if self.radius < 0:
            raise ValueError("ball radius must be nonnegative")
        x1, x2 = grid.xi_mesh()
        return np.hypot(x1 - self.center[0], x2 - self.center[1]) <= self.radius


@dataclass(frozen=True)
class BoxRegion:
    center: tuple
    half_widths: tuple

    def mask(self, grid: Grid2D) -> np.ndarray:
        h1, h2 = self.half_widths
        if h1 < 0 or h2 < 0:
            raise ValueError("box half-widths must be nonnegative")
        x1, x2 = grid.xi_mesh()
        return (np.abs(x1 - self.center[0]) <= h1) & (np.abs(x2 - self.center[1]) <= h2)


Region = Union[Annulus, Ball, BoxRegion]


def frequency_project(f: SpinorField, region: Region) -> SpinorField:
    """Sharp cutoff of all Fourier modes outside ``region``."""
    was_physical = f.rep != FREQUENCY
    mask = region.mask(f.grid)
    out = SpinorField(f.grid, f.to_frequency().data * mask, FREQUENCY)
    return out.to_physical() if was_physical else out


def dyadic_scales(grid: Grid2D):
    """Shell scales 1, 2, 4, ... covering the whole frequency lattice."""
    rmax = float(np.max(grid.xi_norm()))
    scales = [1.0]
    while scales[-1] < rmax:
        scales.append(scales[-1] * 2)
    return scales


def dealias_mask(grid: Grid2D) -> np.ndarray:
    """2/3-rule mask: keep modes with |k| < n/3 on each axis."""
    k = np.abs(grid.k_lattice())
    keep = k < grid.n / 3.0
    return np.outer(keep, keep)


# ---------------------------------------------------------------------------
# Sobolev norms
# ---------------------------------------------------------------------------


def sobolev_norm(f: SpinorField, s: float, homogeneous: bool = False) -> float:
    """H^s (or homogeneous-dot H^s) norm with torus Parseval normalization."""
    c = f.to_frequency().data
    r = f.grid.xi_norm()
    if homogeneous:
        zero_amp = np.sqrt(np.sum(np.abs(c[:, 0, 0]) ** 2))
        if s < 0 and zero_amp > 1e-13 * max(1.0, float(np.max(np.abs(c)))):
            raise ValueError(
                "homogeneous norm with s < 0 is undefined for fields with "
                "nonzero mean"
            )
        w = np.zeros_like(r)
        nz = r > 0
        w[nz] = r[nz] ** s
    else:
        w = (1.0 + r**2) ** (s / 2.0)
    return float(f.grid.box_length * np.sqrt(np.sum((w * np.abs(c)) ** 2)))
