"""End-to-end acceptance suite: one test and one printed verdict line per
shipped guarantee, at the production lattice sizes and stated tolerances.

Slower than the unit tests (several minutes total); every test prints
    PASS  <criterion>  <measured values>
(or FAIL) so the suite doubles as a release report.
"""

import io
import sys
import time

import numpy as np
import pytest

from conftest import band_limited_field
from diraclab.cone_experiments import (
    SIGN_PAIRS,
    ball_l4_experiment,
    bilinear_product_experiment,
    l4_cone_experiment,
    l4_embedding_experiment,
)
from diraclab.evolution import (
    PicardConfig,
    evolve,
    picard_iterate,
    scaling_transform,
    split_initial_data,
)
from diraclab.grid import Grid2D
from diraclab.illposed import (
    IllposednessConfig,
    flow_third_derivative_oracle,
    smoothness_failure_sweep,
)
from diraclab.operators import (
    Ball,
    MultiplierSpec,
    apply_multiplier,
    dirac_operator,
    dirac_projection,
    frequency_project,
    sobolev_norm,
)
from diraclab.params import DiracParams
from diraclab.spacetime import SpacetimeLattice
from diraclab.verify import verify_suite


def verdict(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {name}  {detail}"
    print(line, file=sys.stderr)
    assert ok, line


def small_data(grid, seed, amplitude, radius):
    f = band_limited_field(grid, radius, seed)
    return (amplitude / f.l2_norm()) * f


# ---------------------------------------------------------------------------
# operator algebra
# ---------------------------------------------------------------------------


def test_projection_algebra():
    worst = 0.0
    for n in (16, 64):
        for lam in (1.0, 2.0 + 1.0j):
            g = Grid2D(n)
            p = DiracParams(lambda_sharp=lam)
            f = band_limited_field(g, radius=n, seed=n, mean_zero=True)
            fp = dirac_projection(f, +1, p)
            fm = dirac_projection(f, -1, p)
            ref = f.l2_norm()
            m = MultiplierSpec.gradient_modulus(g)
            ad = dirac_operator(f, p)
            errs = [
                (fp + fm - f).l2_norm() / ref,
                (dirac_projection(fp, +1, p) - fp).l2_norm() / ref,
                dirac_projection(fp, -1, p).l2_norm() / ref,
                (ad - abs(lam) * apply_multiplier(fp - fm, m)).l2_norm()
                / max(ad.l2_norm(), 1e-300),
            ]
            worst = max(worst, *errs)
    verdict("projection-algebra", worst <= 1e-12,
            f"max relative defect {worst:.2e} (tol 1e-12)")


# ---------------------------------------------------------------------------
# conservation and convergence
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("ell", [1, 2])
def test_charge_conservation(ell):
    g = Grid2D(128)
    p = DiracParams(kappa=1.0, ell=ell)
    psi0 = small_data(g, seed=ell, amplitude=0.5, radius=16.0)
    state = split_initial_data(psi0, p)
    q0 = state.charge()
    final, _ = evolve(state, 1.0, 1e-3, p)
    drift = abs(final.charge() - q0) / q0
    verdict(f"charge-conservation-ell{ell}", drift <= 1e-8,
            f"relative drift {drift:.2e} over T=1, n=128, dt=1e-3 (tol 1e-8)")


def test_strang_order():
    g = Grid2D(32)
    p = DiracParams(kappa=1.0, ell=1)
    psi0 = small_data(g, seed=3, amplitude=1.0, radius=5.0)
    # each dt divides the horizon exactly, so no endpoint-time mismatch
    dts = [1e-2, 5e-3, 2.5e-3, 1.25e-3]
    ref, _ = evolve(split_initial_data(psi0, p), 0.25, min(dts) / 8, p)
    ref_psi = ref.reconstruct()
    errs = []
    for dt in dts:
        fin, _ = evolve(split_initial_data(psi0, p), 0.25, dt, p)
        errs.append((fin.reconstruct() - ref_psi).l2_norm())
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    verdict("strang-order", 1.9 <= slope <= 2.1,
            f"self-convergence order {slope:.3f} (want [1.9, 2.1])")


# ---------------------------------------------------------------------------
# scaling
# ---------------------------------------------------------------------------


def test_scaling_invariance():
    worst = 0.0
    for ell in (1, 2):
        g = Grid2D(64)
        f = band_limited_field(g, 8.0, seed=4 + ell, mean_zero=True)
        h = scaling_transform(f, 2.0, ell)
        if ell == 1:
            a = sobolev_norm(f, 0.5, homogeneous=True)
            b = sobolev_norm(h, 0.5, homogeneous=True)
        else:
            a, b = f.l2_norm(), h.l2_norm()
        worst = max(worst, abs(a - b) / a)
    verdict("scaling-invariance", worst <= 1e-10,
            f"max critical-norm defect {worst:.2e} (tol 1e-10)")


@pytest.mark.parametrize("ell", [1, 2])
def test_flow_scaling_covariance(ell):
    # evolve_kappa(T phi, t) = T evolve_{kappa/lam^2}(phi, lam t) up to
    # discretization; the bound is the measured dt error of the base run
    g = Grid2D(64)
    lam, t, dt = 2.0, 0.1, 1e-3
    phi = small_data(g, seed=6 + ell, amplitude=0.6, radius=3.0)
    p_fast = DiracParams(kappa=1.0, ell=ell)
    p_slow = DiracParams(kappa=1.0 / lam**2, ell=ell)
    lhs, _ = evolve(split_initial_data(scaling_transform(phi, lam, ell),
                                       p_fast), t, dt, p_fast)
    base, _ = evolve(split_initial_data(phi, p_slow), lam * t, dt, p_slow)
    band = Ball((0.0, 0.0), (g.n // 2 - 1) / lam)
    base_psi = base.reconstruct()
    rhs_f = scaling_transform(frequency_project(base_psi, band), lam, ell)
    disc = (lhs.reconstruct() - rhs_f).l2_norm()
    coarse, _ = evolve(split_initial_data(phi, p_slow), lam * t, 2 * dt, p_slow)
    dt_err = (coarse.reconstruct() - base_psi).l2_norm()
    ok = disc < max(10.0 * dt_err, 1e-10)
    verdict(f"flow-scaling-covariance-ell{ell}", ok,
            f"discrepancy {disc:.2e} vs dt-error {dt_err:.2e}")


# ---------------------------------------------------------------------------
# Picard contraction
# ---------------------------------------------------------------------------


def test_picard_contraction_and_limit():
    g = Grid2D(16)
    p = DiracParams(kappa=1.0, ell=1)
    psi0 = small_data(g, seed=21, amplitude=0.3, radius=4.0)
    T = 0.08
    res = picard_iterate(psi0, PicardConfig(T=T, n_iter=8,
                                            quadrature_points=128), p)
    ratios = res.residual_ratios()[:6]
    contracting = bool(np.all(ratios < 1.0)) and not res.diverged
    limit = res.final().reconstruct()
    errs = []
    dts = (8e-3, 2e-3)
    for dt in dts:
        fin, _ = evolve(split_initial_data(psi0, p), T, dt, p)
        errs.append((fin.reconstruct() - limit).l2_norm())
    slope = np.log(errs[0] / errs[1]) / np.log(dts[0] / dts[1])
    ok = contracting and abs(slope - 2.0) <= 0.3
    verdict("picard-contraction", ok,
            f"max ratio {ratios.max():.3f} (<1), Strang-vs-limit order "
            f"{slope:.2f} (want 2 +- 0.3)")


# ---------------------------------------------------------------------------
# L^4 and bilinear exponents
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def lat64():
    return SpacetimeLattice(Grid2D(64), 64)


def test_l4_cone_exponents(lat64):
    rep = l4_cone_experiment(lat64, lams=(4, 6, 9, 13, 19),
                             Ls=(2, 3, 5, 8, 12), mus=(4, 6, 9, 12, 15),
                             trials=16, seed=0)
    targets = {"mu": 0.25, "lam": 0.125, "L": 0.375}
    errs = {k: rep.fitted[f"slope_{k}"] - v for k, v in targets.items()}
    ok = all(abs(e) <= 0.1 for e in errs.values())
    detail = ", ".join(f"{k}: {rep.fitted[f'slope_{k}']:.3f} (want {v})"
                       for k, v in targets.items())
    verdict("l4-cone-exponents", ok, detail + " (tol 0.1)")


def test_l4_embedding_flat(lat64):
    rep = l4_embedding_experiment(lat64, lams=(4, 6, 9, 13, 19),
                                  trials=16, seed=0)
    slope = rep.fitted["slope_lam"]
    verdict("l4-embedding-flat", abs(slope) <= 0.1,
            f"lam-slope {slope:.3f} (want 0 +- 0.1)")


def test_ball_l4_exponent(lat64):
    rep = ball_l4_experiment(lat64, mus=(4, 6, 9, 12, 15), lam=19.0,
                             trials=16, seed=0)
    slope = rep.fitted["slope_mu"]
    verdict("ball-l4-exponent", abs(slope - 0.25) <= 0.1,
            f"mu-slope {slope:.3f} (want 0.25 +- 0.1)")


@pytest.mark.parametrize("s", [0.5, 0.875])
def test_bilinear_exponents(lat64, s):
    rep = bilinear_product_experiment(lat64, s=s, b=0.55,
                                      mus=(4, 6, 9, 12, 16), trials=8, seed=0)
    target = 0.375 - s
    slopes = {}
    for s1, s2 in SIGN_PAIRS:
        lab = f"{'+' if s1 > 0 else '-'}{'+' if s2 > 0 else '-'}"
        slopes[lab] = rep.fitted[f"slope_mu_{lab}"]
    ok = all(abs(v - target) <= 0.1 for v in slopes.values())
    detail = ", ".join(f"{k}: {v:.3f}" for k, v in slopes.items())
    verdict(f"bilinear-exponent-s{s:g}", ok,
            f"{detail} (want {target:+.3f} +- 0.1)")


# ---------------------------------------------------------------------------
# trilinear probe
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("ell", [1, 2])
def test_trilinear_oracle(ell):
    p = DiracParams(ell=ell)
    res = flow_third_derivative_oracle(p, n=64, lam0=6.0, mu0=2.0, t=5e-3)
    ok = res["cos_flow_kernel"] >= 0.99 and res["cos_flow_duhamel"] >= 0.99
    verdict(f"trilinear-oracle-ell{ell}", ok,
            f"cos(flow, kernel) {res['cos_flow_kernel']:.5f}, "
            f"cos(flow, duhamel) {res['cos_flow_duhamel']:.5f} (tol 0.99)")


@pytest.mark.parametrize("ell,s_vals", [(1, (0.25, 0.75)), (2, (-0.25, 0.25))])
def test_smoothness_failure_exponents(ell, s_vals):
    cfg = IllposednessConfig(ell=ell, s_values=s_vals,
                             lambdas=(16, 32, 64, 128), epsilon=0.05)
    rep = smoothness_failure_sweep(cfg)
    sc = {1: 0.5, 2: 0.0}[ell]
    details = []
    ok = True
    for s in s_vals:
        fit = rep.fitted[f"slope_s_{s:g}"]
        pred = rep.fitted[f"predicted_s_{s:g}"]
        ok &= abs(fit - pred) <= 0.15
        ok &= (fit > 0) == (s < sc)
        details.append(f"s={s:g}: {fit:+.3f} (pred {pred:+.3f})")
    verdict(f"smoothness-failure-ell{ell}", ok,
            ", ".join(details) + " (tol 0.15, sign must match s < s_c)")


# ---------------------------------------------------------------------------
# self-verification
# ---------------------------------------------------------------------------


def test_verify_suite_green_and_fast():
    buf = io.StringIO()
    t0 = time.perf_counter()
    ok = verify_suite(stream=buf)
    elapsed = time.perf_counter() - t0
    verdict("verify-suite", ok and elapsed <= 120.0,
            f"all checks {'green' if ok else 'RED'} in {elapsed:.1f}s (limit 120s)")
