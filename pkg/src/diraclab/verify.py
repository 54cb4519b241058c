"""Fast self-verification: exact operator identities on small grids.

Each check is a pure function returning (passed, detail); the suite runs
them all on n in {16, 32} grids in a few seconds and reports one line per
check.  These are identity-level invariants (projection algebra, isometry,
Parseval, conservation, exact scaling, round-trips), not statistical fits.
"""

from __future__ import annotations

import io
import os
import tempfile

import numpy as np

from .checkpoint import load_checkpoint, save_checkpoint
from .evolution import evolve, scaling_transform, split_initial_data
from .grid import FREQUENCY, Grid2D, SpinorField
from .nonlinear import apply_nonlinearity
from .operators import (
    dealias_mask,
    dirac_operator,
    dirac_projection,
    frequency_project,
    half_wave_propagate,
    Annulus,
    dyadic_scales,
    sobolev_norm,
)
from .params import DiracParams
from .spacetime import SpacetimeField, SpacetimeLattice, XsbParams, xsb_norm

TOL_ALGEBRA = 1e-12
TOL_SCALING = 1e-10


def _rand(grid, seed, mean_zero=False):
    f = SpinorField.random(grid, np.random.default_rng(seed))
    if mean_zero:
        c = f.to_frequency().data.copy()
        c[:, 0, 0] = 0.0
        f = SpinorField(grid, c, FREQUENCY)
    return f


def _rel(err, ref):
    return err / max(ref, 1e-300)


def check_projection_algebra(n=32, seed=1):
    """Pi^+ + Pi^- = I, idempotency, orthogonality, commutation with alpha.D.

    Mean-zero data: at xi = 0 the projections degenerate to I/2 by
    convention, which is complementary but not idempotent.
    """
    grid = Grid2D(n)
    p = DiracParams(lambda_sharp=0.8 - 0.6j)
    f = _rand(grid, seed, mean_zero=True)
    fp = dirac_projection(f, +1, p)
    fm = dirac_projection(f, -1, p)
    ref = f.l2_norm()
    errs = [
        _rel((fp + fm - f).l2_norm(), ref),
        _rel((dirac_projection(fp, +1, p) - fp).l2_norm(), ref),
        _rel(dirac_projection(fp, -1, p).l2_norm(), ref),
        _rel(abs(fp.inner(fm)), ref**2),
        _rel((dirac_operator(fp, p) - dirac_projection(dirac_operator(f, p), +1, p)).l2_norm(),
             dirac_operator(f, p).l2_norm()),
    ]
    worst = max(errs)
    return worst <= TOL_ALGEBRA, f"max relative defect {worst:.3e} (tol {TOL_ALGEBRA})"


def check_propagator_isometry(n=32, seed=2):
    """S_pm(t) is an L^2 isometry with the group property S(t)S(s)=S(t+s)."""
    grid = Grid2D(n)
    f = _rand(grid, seed)
    ref = f.l2_norm()
    errs = []
    for sign in (+1, -1):
        g = half_wave_propagate(f, 0.37, sign)
        errs.append(abs(g.l2_norm() - ref) / ref)
        h = half_wave_propagate(half_wave_propagate(f, 0.21, sign), 0.16, sign)
        errs.append(_rel((h - g).l2_norm(), ref))
        back = half_wave_propagate(g, -0.37, sign)
        errs.append(_rel((back - f).l2_norm(), ref))
    worst = max(errs)
    return worst <= TOL_ALGEBRA, f"max relative defect {worst:.3e} (tol {TOL_ALGEBRA})"


def check_parseval(n=32, seed=3):
    """Physical and coefficient-space L^2 norms agree."""
    grid = Grid2D(n, box_length=3.7)
    f = _rand(grid, seed)
    a = f.l2_norm()
    b = f.to_frequency().l2_norm()
    err = abs(a - b) / a
    return err <= TOL_ALGEBRA, f"relative mismatch {err:.3e} (tol {TOL_ALGEBRA})"


def check_dyadic_partition(n=32, seed=4):
    """Sharp shells partition the lattice: sum of pieces reassembles the field."""
    grid = Grid2D(n)
    f = _rand(grid, seed)
    acc = SpinorField.zeros(grid, FREQUENCY)
    for lam in dyadic_scales(grid):
        acc = acc + frequency_project(f, Annulus(lam))
    err = _rel((acc - f).l2_norm(), f.l2_norm())
    return err <= TOL_ALGEBRA, f"relative defect {err:.3e} (tol {TOL_ALGEBRA})"


def check_nonlinearity_realness(n=32, seed=5):
    """<psi, N_ell(psi, psi) psi> is real for both couplings (charge mechanism)."""
    grid = Grid2D(n)
    worst = 0.0
    for ell in (1, 2):
        p = DiracParams(ell=ell, b1=1.3, b2=0.7)
        f = _rand(grid, seed + ell)
        q = f.inner(apply_nonlinearity(f, f, f, p))
        worst = max(worst, abs(q.imag) / max(abs(q), 1e-300))
    return worst <= 1e-11, f"max relative imaginary part {worst:.3e} (tol 1e-11)"


def check_charge_conservation(n=32, seed=6):
    """Short nonlinear run conserves charge to near round-off."""
    grid = Grid2D(n)
    p = DiracParams(kappa=1.0, ell=1)
    f = 0.5 * _rand(grid, seed)
    state = split_initial_data(f, p)
    q0 = state.charge()
    final, _ = evolve(state, 0.05, 1e-3, p)
    drift = abs(final.charge() - q0) / q0
    return drift <= 1e-10, f"relative charge drift {drift:.3e} over t=0.05 (tol 1e-10)"


def check_scaling_invariance(n=32, seed=7):
    """Exact lattice dilation preserves the critical norm for each coupling."""
    grid = Grid2D(n)
    worst = 0.0
    detail = []
    for ell, s_hom in ((1, 0.5), (2, 0.0)):
        f = _rand(grid, seed + ell, mean_zero=True)
        f = frequency_project(f, Annulus(4.0))   # leave headroom for lam = 2
        g = scaling_transform(f, 2.0, ell)
        if ell == 1:
            a = sobolev_norm(f, s_hom, homogeneous=True)
            b = sobolev_norm(g, s_hom, homogeneous=True)
        else:
            a, b = f.l2_norm(), g.l2_norm()
        err = abs(a - b) / a
        worst = max(worst, err)
        detail.append(f"ell={ell}: {err:.3e}")
    return worst <= TOL_SCALING, ", ".join(detail) + f" (tol {TOL_SCALING})"


def check_dealias_projection(n=32):
    """2/3-rule mask is a projection keeping |k| < n/3."""
    grid = Grid2D(n)
    mask = dealias_mask(grid)
    k = np.abs(grid.k_lattice())
    want = np.outer(k < n / 3.0, k < n / 3.0)
    ok = np.array_equal(mask, want)
    return ok, f"{int(mask.sum())} modes kept of {n * n}"


def check_spacetime_roundtrip(n=16, nt=16, seed=8):
    """Space-time transform round-trip and Parseval; b=0 norm equals L^2."""
    lat = SpacetimeLattice(Grid2D(n), nt)
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((nt, n, n)) + 1j * rng.standard_normal((nt, n, n))
    u = SpacetimeField(lat, data, "physical")
    back = u.to_frequency().to_physical()
    errs = [
        _rel(float(np.abs(back.data - u.data).max()), float(np.abs(u.data).max())),
        abs(u.l2_norm() - u.to_frequency().l2_norm()) / u.l2_norm(),
        abs(xsb_norm(u, XsbParams(s=0.0, b=0.0)) - u.l2_norm()) / u.l2_norm(),
    ]
    worst = max(errs)
    return worst <= TOL_ALGEBRA, f"max relative defect {worst:.3e} (tol {TOL_ALGEBRA})"


def check_checkpoint_roundtrip(n=16, seed=9):
    """DHC1 round-trip is bit-exact."""
    grid = Grid2D(n, box_length=5.1)
    f = _rand(grid, seed)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "field.dhc")
        save_checkpoint(f, path)
        g = load_checkpoint(path)
    ok = (
        g.grid == f.grid and g.rep == f.rep
        and np.array_equal(g.data.view(np.float64), f.data.view(np.float64))
    )
    return ok, "bit-exact" if ok else "payload mismatch"


ALL_CHECKS = (
    check_projection_algebra,
    check_propagator_isometry,
    check_parseval,
    check_dyadic_partition,
    check_nonlinearity_realness,
    check_charge_conservation,
    check_scaling_invariance,
    check_dealias_projection,
    check_spacetime_roundtrip,
    check_checkpoint_roundtrip,
)


def verify_suite(stream=None) -> bool:
    """Run every check, print one PASS/FAIL line each; True iff all pass."""
    out = stream or io.StringIO()
    all_ok = True
    for check in ALL_CHECKS:
        ok, detail = check()
        all_ok &= ok
        print(f"{'PASS' if ok else 'FAIL'}  {check.__name__:32s} {detail}", file=out)
    if stream is None:
        print(out.getvalue(), end="")
    return all_ok
