"""Trilinear smoothness-failure probe below the critical index.

For data phi whose first-component Fourier transform is the indicator of
the box B = {|xi1 - lam| <= mu, |xi2| <= mu}, the cubic term of the
Duhamel expansion is

    L(phi)(t) = sum_{s1} Pi^{s1}(D) (V_{s1}, 0),
    V_{s1}(xi) = sum_{inner tuples} sum_{triples} coef * p(t, xi, omega),
    p(t, xi, omega) = t exp(-i s1 t |xi|) exp(i t omega / 2)
                        * sin(t omega / 2) / (t omega / 2),

where p is the exact value of the oscillatory Duhamel time integral
(|p| <= t always, numerically stable as t*omega -> 0) and omega collects
the four wave phases of one sign tuple (s1; s2, s3, s4).  For the
pointwise cubic coupling the triple runs over u - v + w = xi with u, v, w
in B and coef = b1 (the conjugated slot is v); for the Hartree coupling it
runs over sigma + w = xi with u, u + sigma in B and coef = 2 pi / |sigma|
(sigma = 0 dropped, matching the mean-zero potential convention).

With mu = lam^(1 - eps) and t = delta lam^(-1 - eps), the amplitude-
normalized ratio ||L||_{H^s} / ||phi||_{H^s}^3 grows like

    lam^(2 (s_c(ell) - s) - eps (2 + 2 s_c(ell))),

positive exactly when s is below the scaling-critical index s_c(ell); the
sweep fits this exponent.  The sweep evaluates the box sums by a strided
quadrature with a fixed number of sample points per side at every scale,
so the relative quadrature bias is scale-independent and cancels in
log-log slope fits.

``trilinear_term`` evaluates the same object on an actual grid (exact in
time, optional strided frequency sub-sampling with a cost guard), and the
oracle cross-checks it against two independent evaluations of the cubic
response: the amplitude-extracted third derivative of the time-stepped
flow and a Duhamel quadrature along the free trajectory.  The kernel
carries no projections on the data slots, so agreement requires
t * lam << 1, where every sign tuple's kernel degenerates to t and the
data-slot projections sum to the identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .evolution import SplitState, _duhamel_map, evolve, split_initial_data
from .grid import FREQUENCY, Grid2D, SpinorField
from .operators import dirac_projection, half_wave_propagate
from .params import DiracParams, critical_index
from .report import ExperimentReport, Stopwatch, fit_loglog

HARTREE_CONSTANT = 2.0 * np.pi

#: the 8 inner sign tuples (s2, s3, s4); summing them multiplies the
#: near-resonant kernel by ~8 without changing any growth exponent.
INNER_TUPLES = tuple(itertools.product((+1, -1), repeat=3))


class KernelBudgetError(RuntimeError):
    """Lattice summation exceeds the configured cost budget."""


def duhamel_phase(t: float, xi_norm, omega, s1: int):
    """Exact integral of exp(-i s1 (t-t') |xi|) exp(i t' omega) over [0, t]."""
    x = 0.5 * t * np.asarray(omega)
    return t * np.exp(-1j * s1 * t * np.asarray(xi_norm)) * np.exp(1j * x) * np.sinc(x / np.pi)


# ---------------------------------------------------------------------------
# sweep configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IllposednessConfig:
    """Sweep parameters for the smoothness-failure experiment.

    epsilon fixes mu = lam^(1-eps); delta fixes t = delta lam^(-1-eps).
    quad_points is the number of strided quadrature samples per box side.
    """

    ell: int
    s_values: tuple
    lambdas: tuple
    epsilon: float = 0.05
    delta: float = 1e-2
    quad_points: int = 8
    sign_out: int = +1
    b1: float = 1.0

    def __post_init__(self):
        critical_index(self.ell)
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if len(self.lambdas) < 3:
            raise ValueError("need >= 3 lambda values for a slope fit")
        if any(lam < 2 for lam in self.lambdas):
            raise ValueError("lambda values must be >= 2")
        if self.quad_points < 3:
            raise ValueError("quad_points must be >= 3")
        if self.quad_points > 12:
            raise KernelBudgetError(
                f"quad_points = {self.quad_points} would cost "
                f"{self.quad_points ** 6} kernel terms per scale; use <= 12"
            )
        if self.sign_out not in (+1, -1):
            raise ValueError("sign_out must be +1 or -1")

    def mu(self, lam: float) -> float:
        return lam ** (1.0 - self.epsilon)

    def t(self, lam: float) -> float:
        return self.delta * lam ** (-1.0 - self.epsilon)

    def predicted_slope(self, s: float) -> float:
        sc = critical_index(self.ell)
        return 2.0 * (sc - s) - self.epsilon * (2.0 + 2.0 * sc)


# ---------------------------------------------------------------------------
# scale-free strided kernel quadrature (sweep engine)
# ---------------------------------------------------------------------------


def _box_samples(lam: float, mu: float, q: int):
    """q x q strided sample points covering the box of side 2 mu at (lam, 0)."""
    off = (np.arange(q) - (q - 1) / 2.0) * (2.0 * mu / q)
    o1, o2 = np.meshgrid(off, off, indexing="ij")
    pts = np.column_stack([lam + o1.ravel(), o2.ravel()])
    return pts, 2.0 * mu / q


def kernel_bins(ell: int, lam: float, mu: float, t: float, q: int,
                sign_out: int = +1, b1: float = 1.0):
    """Binned quadrature values of V(xi) for one output branch.

    Returns (xi_bins, vals, h): output frequencies on the sample lattice,
    shape (m, 2); the quadrature-weighted complex amplitudes V (all 8 inner
    tuples summed), shape (m,); and the sample spacing h.
    """
    pts, h = _box_samples(lam, mu, q)
    norms = np.hypot(pts[:, 0], pts[:, 1])
    Q = q * q
    ia = np.arange(Q)
    a2 = np.column_stack([ia // q, ia % q])
    if ell == 1:
        # xi = u - v + w with axes (u, v, w)
        d = (a2[:, None, None, :] - a2[None, :, None, :] + a2[None, None, :, :]
             + (q - 1))
    else:
        # xi = sigma + w, sigma = v - u, axes (u, v, w)
        d = (a2[None, :, None, :] - a2[:, None, None, :] + a2[None, None, :, :]
             + (q - 1))
    nbins = 3 * q - 2    # the offset a - b + c spans [-(q-1), 2(q-1)]
    bin_idx = (d[..., 0] * nbins + d[..., 1]).ravel()
    # raw index d = a - b + c + (q-1); each sample index centers at (q-1)/2,
    # so the physical bin offset is h * (d - 3 (q-1) / 2)
    db = np.arange(nbins) - 3.0 * (q - 1) / 2.0
    b1m, b2m = np.meshgrid(db, db, indexing="ij")
    xi_bins = np.column_stack([lam + h * b1m.ravel(), h * b2m.ravel()])
    xi_norm_bins = np.hypot(xi_bins[:, 0], xi_bins[:, 1])
    xi_norm_combo = xi_norm_bins[bin_idx].reshape(Q, Q, Q)

    nu = norms[:, None, None]
    nv = norms[None, :, None]
    nw = norms[None, None, :]
    if ell == 1:
        coef = b1
    else:
        diff = pts[None, :, :] - pts[:, None, :]
        sig = np.hypot(diff[..., 0], diff[..., 1])
        coef = np.zeros_like(sig)
        nz = sig > 0
        coef[nz] = HARTREE_CONSTANT / sig[nz]
        coef = coef[:, :, None]

    vals = np.zeros(nbins * nbins, dtype=np.complex128)
    for s2, s3, s4 in INNER_TUPLES:
        if ell == 1:
            omega = sign_out * xi_norm_combo - s2 * nu + s3 * nv - s4 * nw
        else:
            omega = sign_out * xi_norm_combo + s2 * nu - s3 * nv - s4 * nw
        p = duhamel_phase(t, xi_norm_combo, omega, sign_out)
        contrib = (coef * p).ravel()
        vals += (np.bincount(bin_idx, weights=contrib.real, minlength=nbins**2)
                 + 1j * np.bincount(bin_idx, weights=contrib.imag, minlength=nbins**2))
    # two free 2D sums carry the quadrature weight h^4
    return xi_bins, h**4 * vals, h


def smoothness_failure_sweep(cfg: IllposednessConfig) -> ExperimentReport:
    """Fit the growth exponent of ||L||_{H^s} / ||phi||_{H^s}^3 in lam."""
    report = ExperimentReport("illposed-sweep", {
        "ell": cfg.ell, "s_values": list(cfg.s_values),
        "lambdas": list(cfg.lambdas), "epsilon": cfg.epsilon,
        "delta": cfg.delta, "quad_points": cfg.quad_points,
        "sign_out": cfg.sign_out, "b1": cfg.b1,
    })
    with Stopwatch() as sw:
        per_lam = []
        for lam in cfg.lambdas:
            mu, t = cfg.mu(lam), cfg.t(lam)
            xi_bins, vals, h = kernel_bins(cfg.ell, lam, mu, t,
                                           cfg.quad_points, cfg.sign_out, cfg.b1)
            pts, _ = _box_samples(lam, mu, cfg.quad_points)
            per_lam.append((lam, mu, t, h, xi_bins, vals, pts))
        for s in cfg.s_values:
            ratios = []
            rows = []
            for lam, mu, t, h, xi_bins, vals, pts in per_lam:
                wt_out = (1.0 + np.sum(xi_bins**2, axis=1)) ** s
                # 1/2 = |Pi (1,0)|^2 away from the origin
                L_hs = np.sqrt(h**2 * np.sum(wt_out * 0.5 * np.abs(vals) ** 2))
                wt_in = (1.0 + np.sum(pts**2, axis=1)) ** s
                phi_hs = np.sqrt(h**2 * np.sum(wt_in))
                ratios.append(L_hs / phi_hs**3)
                rows.append({"lam": lam, "mu": mu, "t": t,
                             "phi_Hs": phi_hs, "L_Hs": L_hs})
            slope, stderr, _ = fit_loglog(cfg.lambdas, ratios)
            predicted = cfg.predicted_slope(s)
            report.fitted[f"slope_s_{s:g}"] = slope
            report.fitted[f"stderr_s_{s:g}"] = stderr
            report.fitted[f"predicted_s_{s:g}"] = predicted
            for row, ratio in zip(rows, ratios):
                report.add_row(
                    ell=cfg.ell, s=s, epsilon=cfg.epsilon, delta=cfg.delta,
                    **{"lambda": row["lam"]}, mu=row["mu"], t=row["t"],
                    phi_Hs=row["phi_Hs"], L_Hs=row["L_Hs"], ratio=ratio,
                    fitted_slope=slope, predicted_slope=predicted,
                )
    report.finalize(sw.elapsed)
    return report


# ---------------------------------------------------------------------------
# grid-based evaluation and oracle
# ---------------------------------------------------------------------------


def box_data(lam: float, mu: float, grid: Grid2D) -> SpinorField:
    """Spinor (F^{-1} chi_B, 0) for B = {|xi1 - lam| <= mu, |xi2| <= mu}."""
    nyq = (2.0 * np.pi / grid.box_length) * (grid.n // 2 - 1)
    if lam + mu > nyq:
        raise ValueError(
            f"box (lam={lam}, mu={mu}) exceeds the lattice range |xi| <= {nyq:.3g}"
        )
    xi = grid.xi_axes()
    in1 = np.abs(xi - lam) <= mu
    in2 = np.abs(xi) <= mu
    c = np.zeros((2, grid.n, grid.n), dtype=np.complex128)
    c[0][np.ix_(in1, in2)] = 1.0
    return SpinorField(grid, c, FREQUENCY)


def trilinear_term(phi: SpinorField, t: float, p: DiracParams,
                   stride: int = 1, budget: int = 4_000_000) -> SpinorField:
    """Exact-in-time lattice evaluation of the cubic Duhamel term.

    Sums all 16 sign tuples (both output branches, all inner tuples) over
    the frequency support of phi's first component.  ``stride`` sub-samples
    the two free frequency sums (weight stride^4); outputs are evaluated at
    every reachable mode.  Raises KernelBudgetError when the summation size
    exceeds ``budget`` — rerun with a larger stride.
    """
    grid = phi.grid
    if t == 0.0:
        return SpinorField.zeros(grid, FREQUENCY)
    c = phi.to_frequency().data
    if np.abs(c[1]).max() > 0:
        raise ValueError("trilinear kernel expects data in the first component only")
    idx = np.argwhere(np.abs(c[0]) > 0)
    if len(idx) == 0:
        return SpinorField.zeros(grid, FREQUENCY)
    k = grid.k_lattice()
    modes = np.column_stack([k[idx[:, 0]], k[idx[:, 1]]])
    amps = c[0][idx[:, 0], idx[:, 1]]
    scale = 2.0 * np.pi / grid.box_length
    norms = scale * np.hypot(modes[:, 0], modes[:, 1])
    m = len(modes)

    if stride < 1:
        raise ValueError("stride must be >= 1")
    sub = np.flatnonzero((modes[:, 0] % stride == 0) & (modes[:, 1] % stride == 0))
    if len(sub) == 0:
        raise ValueError(f"stride {stride} leaves no sample modes in the support")
    cost = len(sub) ** 2 * m
    if cost > budget:
        raise KernelBudgetError(
            f"kernel sum size {cost} exceeds budget {budget}; "
            f"use a coarser sub-lattice (larger stride)"
        )
    weight = float(stride) ** 4

    half = grid.n // 2
    out = np.zeros((2, grid.n, grid.n), dtype=np.complex128)
    for s1 in (+1, -1):
        val = np.zeros((grid.n, grid.n), dtype=np.complex128)
        for a in sub:
            for b in sub:
                if p.ell == 1:
                    base = modes[a] - modes[b]      # xi = (u - v) + w
                    coef = p.b1 * amps[a] * np.conj(amps[b])
                else:
                    base = modes[b] - modes[a]      # xi = sigma + w
                    if base[0] == 0 and base[1] == 0:
                        continue
                    sn = scale * np.hypot(*base)
                    coef = (HARTREE_CONSTANT / sn) * np.conj(amps[a]) * amps[b]
                kk = base + modes                   # (m, 2) output modes
                if np.any(np.abs(kk) > half - 1):
                    raise ValueError("kernel output leaves the representable mode range")
                xin = scale * np.hypot(kk[:, 0], kk[:, 1])
                acc = np.zeros(m, dtype=np.complex128)
                for s2, s3, s4 in INNER_TUPLES:
                    if p.ell == 1:
                        omega = s1 * xin - s2 * norms[a] + s3 * norms[b] - s4 * norms
                    else:
                        omega = s1 * xin + s2 * norms[a] - s3 * norms[b] - s4 * norms
                    acc += duhamel_phase(t, xin, omega, s1)
                np.add.at(val, (kk[:, 0] % grid.n, kk[:, 1] % grid.n),
                          weight * coef * amps * acc)
        branch = SpinorField.from_components(grid, val, np.zeros_like(val), FREQUENCY)
        out += dirac_projection(branch, s1, p).data
    return SpinorField(grid, out, FREQUENCY)


def _field_cosine(a: SpinorField, b: SpinorField) -> float:
    """|<a, b>| / (||a|| ||b||), insensitive to complex scalar factors."""
    x = a.to_frequency().data.ravel()
    y = b.to_frequency().data.ravel()
    na, nb = np.linalg.norm(x), np.linalg.norm(y)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.abs(np.vdot(x, y)) / (na * nb))


def _free_state(state0: SplitState, t: float) -> SplitState:
    return SplitState(half_wave_propagate(state0.psi_plus, t, +1),
                      half_wave_propagate(state0.psi_minus, t, -1), t)


def duhamel_cubic_on_grid(phi: SpinorField, t: float, p: DiracParams,
                          quadrature_points: int = 32) -> SplitState:
    """Cubic term via Duhamel quadrature along the free trajectory."""
    state0 = split_initial_data(phi, p)
    times = np.linspace(0.0, t, quadrature_points + 1)
    free = [_free_state(state0, tt) for tt in times]
    mapped = _duhamel_map(times, free, state0, p)[-1]
    tail = free[-1]
    return SplitState(mapped.psi_plus - tail.psi_plus,
                      mapped.psi_minus - tail.psi_minus, t)


def flow_cubic_on_grid(phi: SpinorField, t: float, p: DiracParams,
                       amplitudes=(0.05, 0.1, 0.2), n_steps: int = 40) -> SpinorField:
    """Third amplitude-derivative of the flow, extracted by regression.

    Runs the stepper from delta * phi for several delta, subtracts the free
    evolution, and least-squares fits the [delta^3, delta^5] model; returns
    the delta^3 coefficient field.
    """
    if len(amplitudes) < 2:
        raise ValueError("need >= 2 amplitudes to separate delta^3 from delta^5")
    grid = phi.grid
    diffs = []
    for delta in amplitudes:
        st = split_initial_data(delta * phi, p)
        free = _free_state(st, t).reconstruct()
        final, _ = evolve(st, t, t / n_steps, p)
        diffs.append((final.reconstruct() - free).to_frequency().data.ravel())
    D = np.asarray(amplitudes, dtype=float)
    A = np.column_stack([D**3, D**5])
    coef, *_ = np.linalg.lstsq(A, np.asarray(diffs), rcond=None)
    c3 = coef[0].reshape(2, grid.n, grid.n)
    return SpinorField(grid, c3, FREQUENCY)


def flow_third_derivative_oracle(p: DiracParams, n: int = 48, lam0: float = 6.0,
                                 mu0: float = 2.0, t: float = 5e-3,
                                 amplitudes=(0.05, 0.1, 0.2),
                                 quadrature_points: int = 32,
                                 n_steps: int = 40) -> dict:
    """Cross-validate the three cubic-term evaluations; returns cosines.

    Keeps t * lam0 small so the bare kernel (no data-slot projections)
    aligns with the true flow response.
    """
    grid = Grid2D(n)
    phi = box_data(lam0, mu0, grid)
    flow_c3 = flow_cubic_on_grid(phi, t, p, amplitudes, n_steps)
    duh = duhamel_cubic_on_grid(phi, t, p, quadrature_points).reconstruct()
    kern = trilinear_term(phi, t, p)
    return {
        "cos_flow_duhamel": _field_cosine(flow_c3, duh),
        "cos_duhamel_kernel": _field_cosine(duh, kern),
        "cos_flow_kernel": _field_cosine(flow_c3, kern),
        "flow_c3_norm": flow_c3.l2_norm(),
        "duhamel_norm": duh.l2_norm(),
        "kernel_norm": kern.l2_norm(),
        "t_lam": t * lam0,
    }
