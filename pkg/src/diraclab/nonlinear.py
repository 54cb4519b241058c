"""Cubic couplings of the honeycomb Dirac system.

Power coupling (ell=1): the diagonal matrix

    N1(psi_a, psi_b) = diag(b1 a1 conj(b1') + 2 b2 a2 conj(b2'),
                            b1 a2 conj(b2') + 2 b2 a1 conj(b1'))

acting pointwise on a third spinor.  Hartree coupling (ell=2): the scalar
potential |x|^{-1} * (psi_a^dagger psi_b), realized on the torus as the
Fourier multiplier 2*pi/|xi| with zero mode set to 0 (mean-zero
convention; the lattice zero mode of the kernel diverges).

All products are formed in physical space behind a 2/3-rule dealias
projection applied to inputs and output.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid2D, GridMismatchError, SpinorField
from .operators import dealias_mask
from .params import DiracParams

HARTREE_SYMBOL_CONSTANT = 2.0 * np.pi  # 2D Fourier transform of |x|^{-1}


def _aligned_physical(*fields: SpinorField):
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError("nonlinearity inputs on different grids")
    return grid, [f.to_physical() for f in fields]


def _dealias(grid: Grid2D, data: np.ndarray) -> np.ndarray:
    mask = dealias_mask(grid)
    coeff = np.fft.fft2(data, axes=(-2, -1)) * mask
    return np.fft.ifft2(coeff, axes=(-2, -1))


def apply_power_nonlinearity(psi1: SpinorField, psi2: SpinorField,
                             psi3: SpinorField, p: DiracParams,
                             dealias: bool = True) -> SpinorField:
    """N1(psi1, psi2) psi3, bilinear in (psi1, conj psi2), linear in psi3."""
    grid, (f1, f2, f3) = _aligned_physical(psi1, psi2, psi3)
    a, b, c = f1.data, f2.data, f3.data
    if dealias:
        a = _dealias(grid, a)
        b = _dealias(grid, b)
        c = _dealias(grid, c)
    g11 = a[0] * np.conj(b[0])
    g22 = a[1] * np.conj(b[1])
    out = np.empty_like(c)
    out[0] = (p.b1 * g11 + 2.0 * p.b2 * g22) * c[0]
    out[1] = (p.b1 * g22 + 2.0 * p.b2 * g11) * c[1]
    if dealias:
        out = _dealias(grid, out)
    return SpinorField(grid, out)


def hartree_potential(psi1: SpinorField, psi2: SpinorField,
                      dealias: bool = True) -> np.ndarray:
    """Potential |x|^{-1} * (psi1^dagger psi2) as a physical-space array."""
    grid, (f1, f2) = _aligned_physical(psi1, psi2)
    a, b = f1.data, f2.data
    if dealias:
        a = _dealias(grid, a)
        b = _dealias(grid, b)
    rho = np.conj(a[0]) * b[0] + np.conj(a[1]) * b[1]
    r = grid.xi_norm()
    symbol = np.zeros_like(r)
    nz = r > 0
    symbol[nz] = HARTREE_SYMBOL_CONSTANT / r[nz]
    coeff = np.fft.fft2(rho) * symbol
    return np.fft.ifft2(coeff)


def apply_hartree_nonlinearity(psi1: SpinorField, psi2: SpinorField,
                               psi3: SpinorField, p: DiracParams = None,
                               dealias: bool = True) -> SpinorField:
    """[|x|^{-1} * (psi1^dagger psi2)] psi3, applied to both components."""
    grid, (f3,) = _aligned_physical(psi3)
    pot = hartree_potential(psi1, psi2, dealias=dealias)
    c = f3.data
    if dealias:
        c = _dealias(grid, c)
    out = pot[np.newaxis, :, :] * c
    if dealias:
        out = _dealias(grid, out)
    return SpinorField(grid, out)


def apply_nonlinearity(psi1: SpinorField, psi2: SpinorField, psi3: SpinorField,
                       p: DiracParams, dealias: bool = True) -> SpinorField:
    """N_ell(psi1, psi2) psi3 with ell selected by the parameter block."""
    if p.ell == 1:
        return apply_power_nonlinearity(psi1, psi2, psi3, p, dealias=dealias)
    return apply_hartree_nonlinearity(psi1, psi2, psi3, p, dealias=dealias)
