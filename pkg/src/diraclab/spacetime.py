"""Space-time lattice, modulation-weighted norms, and cone packets.

Scalar fields u(t, x) on a (time x space) torus are expanded as

    u(t, x) = sum_{m,k} c_{m,k} exp(i (x . xi_k - t tau_m)),

so a free half-wave exp(i(x.xi - t|xi|)) sits exactly on the characteristic
tau = |xi| and the modulation weight <tau - sign |xi|>^b measures distance
from the light cone of the corresponding propagator.

Packets supported on thickened cones {|xi| <~ lam, |tau - sign|xi|| <= L},
optionally localized to a ball or to a Knapp-style plank (radial window +
angular sector), are the test inputs for the L^4 and bilinear estimate
experiments.  Phases are random per mode; ``phase_jitter`` interpolates
between fully coherent (0, the plank extremizers) and fully random (1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import Grid2D

SPACETIME_PHYSICAL = "physical"
SPACETIME_FREQUENCY = "frequency"


@dataclass(frozen=True)
class SpacetimeLattice:
    """Spatial Grid2D extended by nt time points with period t_period."""

    grid: Grid2D
    nt: int
    t_period: float = 2.0 * np.pi

    def __post_init__(self):
        if self.nt < 4 or self.nt % 2 != 0:
            raise ValueError(f"nt must be even and >= 4, got {self.nt}")
        if not self.t_period > 0:
            raise ValueError("t_period must be positive")

    def tau_axis(self):
        """Modulation frequencies, fft-ordered."""
        return (2.0 * np.pi / self.t_period) * np.fft.fftfreq(self.nt, d=1.0 / self.nt)

    def tau_nyquist(self):
        return (2.0 * np.pi / self.t_period) * (self.nt // 2)

    def cell_volume(self):
        return (self.t_period / self.nt) * self.grid.cell_area

    def total_volume(self):
        return self.t_period * self.grid.box_length**2


@dataclass
class SpacetimeField:
    """Complex scalar field on a SpacetimeLattice; data shape (nt, n, n)."""

    lattice: SpacetimeLattice
    data: np.ndarray
    rep: str = SPACETIME_FREQUENCY

    def __post_init__(self):
        lat = self.lattice
        self.data = np.ascontiguousarray(self.data, dtype=np.complex128)
        if self.data.shape != (lat.nt, lat.grid.n, lat.grid.n):
            raise ValueError(
                f"expected shape ({lat.nt}, {lat.grid.n}, {lat.grid.n}), "
                f"got {self.data.shape}"
            )

    def to_frequency(self) -> "SpacetimeField":
        if self.rep == SPACETIME_FREQUENCY:
            return self
        n2 = self.lattice.grid.n**2
        # time axis carries exp(-i t tau): the analysis transform is an ifft
        coeff = np.fft.ifft(np.fft.fft2(self.data, axes=(1, 2)) / n2, axis=0)
        return SpacetimeField(self.lattice, coeff, SPACETIME_FREQUENCY)

    def to_physical(self) -> "SpacetimeField":
        if self.rep == SPACETIME_PHYSICAL:
            return self
        n2 = self.lattice.grid.n**2
        samples = np.fft.ifft2(np.fft.fft(self.data, axis=0), axes=(1, 2)) * n2
        return SpacetimeField(self.lattice, samples, SPACETIME_PHYSICAL)

    def l2_norm(self) -> float:
        if self.rep == SPACETIME_PHYSICAL:
            return float(np.sqrt(self.lattice.cell_volume() * np.sum(np.abs(self.data) ** 2)))
        return float(np.sqrt(self.lattice.total_volume() * np.sum(np.abs(self.data) ** 2)))

    def l4_norm(self) -> float:
        u = self.to_physical().data
        return float((self.lattice.cell_volume() * np.sum(np.abs(u) ** 4)) ** 0.25)

    def reflect(self) -> "SpacetimeField":
        """u(t, x) -> u(-t, -x): index negation on all lattice axes."""
        c = self.to_frequency().data
        out = c.copy()
        for ax in range(3):
            out = np.flip(np.roll(out, -1, axis=ax), axis=ax)
        return SpacetimeField(self.lattice, out, SPACETIME_FREQUENCY)


@dataclass(frozen=True)
class XsbParams:
    """Indices of the modulation-weighted space-time norm.

    Defaults (b, b') = (0.55, -0.3) sit inside the admissible window
    -1/2 < b' < -1/4 < 1/2 < b used by the contraction argument.
    """

    s: float = 0.0
    b: float = 0.55
    b_prime: float = -0.3
    sign: int = +1

    def __post_init__(self):
        if self.sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")
        for name in ("s", "b", "b_prime"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


def _modulation_weights(lat: SpacetimeLattice, s: float, b: float, sign: int):
    tau = lat.tau_axis()[:, None, None]
    r = lat.grid.xi_norm()[None, :, :]
    w_space = (1.0 + r**2) ** (s / 2.0)
    w_mod = (1.0 + (tau - sign * r) ** 2) ** (b / 2.0)
    return w_space * w_mod


def xsb_norm(u: SpacetimeField, p: XsbParams) -> float:
    """Weighted space-time L^2 norm with weight <xi>^s <tau -+ |xi|>^b."""
    c = u.to_frequency().data
    w = _modulation_weights(u.lattice, p.s, p.b, p.sign)
    return float(np.sqrt(u.lattice.total_volume() * np.sum((w * np.abs(c)) ** 2)))


# ---------------------------------------------------------------------------
# cone packets
# ---------------------------------------------------------------------------


class EmptyPacketError(ValueError):
    pass


@dataclass(frozen=True)
class ConePacketSpec:
    """Support description of a thickened-cone packet.

    lam, L            : spatial scale and modulation thickness of the cone
                        {|xi| <= lam, |tau - sign |xi|| <= L}.
    ball              : optional ((c1, c2), mu) spatial-frequency ball cut.
    radial_extent     : optional; keep lam - radial_extent <= |xi| <= lam.
    sector_arc        : optional tangential slab width about the ray at
                        ``direction_angle``; together with radial_extent this
                        carves the flat Knapp plank that saturates the cone
                        L^4 estimate.
    phase_jitter      : 0 = coherent plank, 1 = fully random phases.
    """

    lam: float
    L: float = 1.0
    ball: Optional[tuple] = None
    sign: int = +1
    seed: int = 0
    radial_extent: Optional[float] = None
    sector_arc: Optional[float] = None
    direction_angle: float = 0.0
    phase_jitter: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.L < 1:
            raise ValueError("modulation thickness L must be >= 1")
        if self.sign not in (+1, -1):
            raise ValueError("sign must be +1 or -1")

    def support_mask(self, lat: SpacetimeLattice) -> np.ndarray:
        if self.lam + self.L > lat.tau_nyquist() - 1:
            raise ValueError(
                f"cone (lam={self.lam}, L={self.L}) is not well inside the "
                f"tau-Nyquist range {lat.tau_nyquist()}"
            )
        x1, x2 = lat.grid.xi_mesh()
        r = np.hypot(x1, x2)
        space = r <= self.lam
        if self.ball is not None:
            (c1, c2), mu = self.ball
            space &= np.hypot(x1 - c1, x2 - c2) <= mu
        if self.radial_extent is not None:
            space &= r >= self.lam - self.radial_extent
        if self.sector_arc is not None:
            # rectangular plank: tangential slab of width sector_arc on the
            # forward side of direction_angle (a wedge would pinch toward
            # the origin and lose the mu-linear mode count)
            ct, st = np.cos(self.direction_angle), np.sin(self.direction_angle)
            radial = x1 * ct + x2 * st
            tangential = -x1 * st + x2 * ct
            space &= (np.abs(tangential) <= 0.5 * self.sector_arc) & (radial > 0)
        tau = lat.tau_axis()[:, None, None]
        return space[None, :, :] & (np.abs(tau - self.sign * r[None, :, :]) <= self.L)


def cone_packet(spec: ConePacketSpec, lat: SpacetimeLattice) -> SpacetimeField:
    """Unit space-time L^2 packet supported on the requested cone region."""
    mask = spec.support_mask(lat)
    n_modes = int(np.count_nonzero(mask))
    if n_modes == 0:
        raise EmptyPacketError(f"no lattice modes in packet support for {spec}")
    rng = np.random.default_rng(spec.seed)
    phases = np.exp(2j * np.pi * spec.phase_jitter * (rng.random(n_modes) - 0.5))
    coeff = np.zeros(mask.shape, dtype=np.complex128)
    coeff[mask] = phases
    u = SpacetimeField(lat, coeff, SPACETIME_FREQUENCY)
    return SpacetimeField(lat, coeff / u.l2_norm(), SPACETIME_FREQUENCY)


def knapp_plank_spec(lam: float, L: float, mu: float, sign: int = +1,
                     seed: int = 0, phase_jitter: float = 0.0,
                     direction_angle: float = 0.0) -> ConePacketSpec:
    """Plank saturating the thickened-cone L^4 estimate.

    Radial extent mu, tangential arc capped at the coherence length
    sqrt(lam L) over which the cone sheet stays within thickness L of its
    tangent plane, so a coherent packet on the plank is a near-extremizer.
    """
    arc = min(2.0 * mu, np.sqrt(lam * L))
    return ConePacketSpec(
        lam=lam, L=L, sign=sign, seed=seed,
        radial_extent=mu, sector_arc=arc,
        direction_angle=direction_angle, phase_jitter=phase_jitter,
    )
