"""Experiment drivers: validated configs in, reports + artifacts out.

Each driver takes the parsed JSON config and returns an ExperimentReport;
``run_config`` validates, dispatches, and persists CSV + JSON + PNG (and
optional field checkpoints) under the configured output directory.
Validation failures raise ConfigError carrying every offending key.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .checkpoint import save_checkpoint
from .cone_experiments import (
    ball_l4_experiment,
    bilinear_product_experiment,
    l4_cone_experiment,
    l4_embedding_experiment,
)
from .evolution import PicardConfig, evolve, picard_iterate, split_initial_data
from .figures import render_report
from .grid import FREQUENCY, Grid2D, SpinorField
from .illposed import IllposednessConfig, smoothness_failure_sweep
from .params import DiracParams
from .report import ExperimentReport, Stopwatch
from .spacetime import SpacetimeLattice


class ConfigError(ValueError):
    """Invalid run configuration; ``keys`` lists every offending field."""

    def __init__(self, message, keys):
        super().__init__(message)
        self.keys = list(keys)


def random_band_limited_data(grid: Grid2D, radius: float, amplitude: float,
                             seed: int) -> SpinorField:
    """Seeded Gaussian spinor supported on |xi| <= radius, given L^2 norm."""
    rng = np.random.default_rng(seed)
    shape = (2, grid.n, grid.n)
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    mask = grid.xi_norm() <= radius
    c *= mask[None, :, :]
    f = SpinorField(grid, c, FREQUENCY)
    norm = f.l2_norm()
    if norm == 0:
        raise ConfigError(f"no modes inside radius {radius}", ["options.radius"])
    return (amplitude / norm) * f


def _build_params(block: dict) -> DiracParams:
    block = dict(block or {})
    lam = block.pop("lambda_sharp", 1.0)
    if isinstance(lam, (list, tuple)):
        lam = complex(lam[0], lam[1])
    try:
        return DiracParams(lambda_sharp=lam, **block)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid params block: {exc}", ["params"]) from exc


# ---------------------------------------------------------------------------
# drivers
# ---------------------------------------------------------------------------


def run_simulate(config: dict):
    opts = config.get("options", {})
    grid = Grid2D(int(opts.get("n", 64)), float(opts.get("box_length", 2 * np.pi)))
    p = _build_params(config.get("params"))
    psi0 = random_band_limited_data(grid, float(opts.get("radius", grid.n / 6)),
                                    float(opts.get("amplitude", 0.5)),
                                    int(config["seed"]))
    t_final = float(opts.get("t_final", 1.0))
    dt = float(opts.get("dt", 1e-3))
    sobolev = tuple(opts.get("sobolev_indices", (0.5, 1.0)))
    report = ExperimentReport("simulate", config)
    with Stopwatch() as sw:
        state = split_initial_data(psi0, p)
        q0 = state.charge()
        final, rows = evolve(state, t_final, dt, p,
                             diagnostics_every=int(opts.get("diagnostics_every", 10)),
                             sobolev_indices=sobolev)
        for row in rows:
            report.add_row(**row)
        report.fitted["charge_drift"] = abs(final.charge() - q0) / q0
    report.finalize(sw.elapsed)
    if opts.get("save_state", False):
        report.meta["checkpoint"] = "final_state.dhc"
        report.meta["_checkpoint_field"] = final.reconstruct()
    return report


def run_picard(config: dict):
    opts = config.get("options", {})
    grid = Grid2D(int(opts.get("n", 32)), float(opts.get("box_length", 2 * np.pi)))
    p = _build_params(config.get("params"))
    psi0 = random_band_limited_data(grid, float(opts.get("radius", grid.n / 8)),
                                    float(opts.get("amplitude", 0.05)),
                                    int(config["seed"]))
    cfg = PicardConfig(
        T=float(opts.get("T", 0.1)),
        n_iter=int(opts.get("n_iter", 6)),
        quadrature_points=int(opts.get("quadrature_points", 16)),
        sobolev_index=float(opts.get("sobolev_index", 1.0)),
    )
    report = ExperimentReport("picard", config)
    with Stopwatch() as sw:
        result = picard_iterate(psi0, cfg, p)
        prev = None
        for i, r in enumerate(result.residuals):
            report.add_row(iteration=i + 1, residual=r,
                           ratio=(r / prev) if prev else float("nan"))
            prev = r
        report.fitted["diverged"] = result.diverged
        report.fitted["final_residual"] = result.residuals[-1]
    report.finalize(sw.elapsed)
    return report


def run_convergence(config: dict):
    """Strang self-convergence: error vs dt against a finer reference run."""
    opts = config.get("options", {})
    grid = Grid2D(int(opts.get("n", 32)), float(opts.get("box_length", 2 * np.pi)))
    p = _build_params(config.get("params"))
    psi0 = random_band_limited_data(grid, float(opts.get("radius", grid.n / 8)),
                                    float(opts.get("amplitude", 0.5)),
                                    int(config["seed"]))
    t_final = float(opts.get("t_final", 0.5))
    dts = [float(d) for d in opts.get("dts", (4e-3, 2e-3, 1e-3, 5e-4))]
    ref_dt = min(dts) / float(opts.get("reference_refinement", 8))
    report = ExperimentReport("convergence", config)
    with Stopwatch() as sw:
        ref, _ = evolve(split_initial_data(psi0, p), t_final, ref_dt, p)
        ref_psi = ref.reconstruct()
        errors = []
        for dt in dts:
            final, _ = evolve(split_initial_data(psi0, p), t_final, dt, p)
            err = (final.reconstruct() - ref_psi).l2_norm()
            errors.append(err)
            report.add_row(dt=dt, error=err)
        from .report import fit_loglog

        slope, stderr, _ = fit_loglog(dts, errors)
        for row in report.rows:
            row["fitted_slope"] = slope
        report.fitted["order"] = slope
        report.fitted["order_stderr"] = stderr
    report.finalize(sw.elapsed)
    return report


def run_l4_cone(config: dict):
    opts = config.get("options", {})
    lat = SpacetimeLattice(Grid2D(int(opts.get("n", 64))), int(opts.get("nt", 64)))
    return l4_cone_experiment(
        lat,
        lams=[float(v) for v in opts.get("lams", (4, 6, 9, 13, 19))],
        Ls=[float(v) for v in opts.get("Ls", (2, 3, 5, 8, 12))],
        mus=[float(v) for v in opts.get("mus", (4, 6, 9, 12, 15))],
        trials=int(opts.get("trials", 16)),
        seed=int(config["seed"]),
        sign=int(opts.get("sign", +1)),
        phase_jitter=float(opts.get("phase_jitter", 0.25)),
    )


def run_bilinear(config: dict):
    opts = config.get("options", {})
    lat = SpacetimeLattice(Grid2D(int(opts.get("n", 64))), int(opts.get("nt", 64)))
    return bilinear_product_experiment(
        lat,
        s=float(opts.get("s", 0.5)),
        b=float(opts.get("b", 0.55)),
        mus=[float(v) for v in opts.get("mus", (4, 6, 9, 12, 16))],
        trials=int(opts.get("trials", 16)),
        seed=int(config["seed"]),
        lam0=float(opts.get("lam0", 4.0)),
        chord_frac=float(opts.get("chord_frac", 0.75)),
        L=float(opts.get("L", 2.0)),
        phase_jitter=float(opts.get("phase_jitter", 0.25)),
    )


def run_illposed_sweep(config: dict):
    opts = config.get("options", {})
    cfg = IllposednessConfig(
        ell=int(opts.get("ell", 1)),
        s_values=tuple(float(v) for v in opts.get("s_values", (0.25,))),
        lambdas=tuple(float(v) for v in opts.get("lambdas", (16, 32, 64, 128))),
        epsilon=float(opts.get("epsilon", 0.05)),
        delta=float(opts.get("delta", 1e-2)),
        quad_points=int(opts.get("quad_points", 8)),
        sign_out=int(opts.get("sign_out", +1)),
        b1=float(opts.get("b1", 1.0)),
    )
    return smoothness_failure_sweep(cfg)


EXPERIMENTS = {
    "simulate": run_simulate,
    "picard": run_picard,
    "convergence": run_convergence,
    "l4-cone": run_l4_cone,
    "bilinear": run_bilinear,
    "illposed-sweep": run_illposed_sweep,
}


def validate_config(config: dict) -> None:
    bad = []
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object", ["<root>"])
    kind = config.get("experiment")
    if kind not in EXPERIMENTS:
        bad.append("experiment")
    seed = config.get("seed")
    if not isinstance(seed, int):
        bad.append("seed")
    for key in ("options", "params"):
        if key in config and not isinstance(config[key], dict):
            bad.append(key)
    if "output_dir" in config and not isinstance(config["output_dir"], str):
        bad.append("output_dir")
    known = {"experiment", "seed", "options", "params", "output_dir"}
    bad.extend(sorted(k for k in config if k not in known))
    if bad:
        raise ConfigError(
            "invalid config fields: " + ", ".join(bad)
            + (f" (experiment must be one of {sorted(EXPERIMENTS)})"
               if "experiment" in bad else ""),
            bad,
        )


def run_config(config: dict, output_dir=None) -> Path:
    """Validate, dispatch, and persist one experiment; returns the out dir."""
    validate_config(config)
    out = Path(output_dir or config.get("output_dir", "out"))
    report = EXPERIMENTS[config["experiment"]](config)
    out.mkdir(parents=True, exist_ok=True)
    stem = config["experiment"]
    report.write_csv(out / f"{stem}.csv")
    field = report.meta.pop("_checkpoint_field", None)
    report.write_json(out / f"{stem}.json")
    render_report(report, out / f"{stem}.png")
    if field is not None:
        save_checkpoint(field, out / report.meta["checkpoint"])
    return out
