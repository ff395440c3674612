"""Command-line benchmark harness.

Subcommands:
  simulate      sample a dataset from a scenario file
  estimate      run one estimator on a dataset file
  benchmark     replicated estimator comparison on a scenario
  rates         n-sweep with a log-log slope fit against the known exponent
  check-theory  numeric verifications (integral inequality, weight bounds,
                divided-difference intervals, worst-case certificates)

Exit codes: 0 success, 1 configuration error, 2 runtime estimation error
(including failed theory checks).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import numpy as np

from . import _backend
from .baselines import BaselineConfig, estimate_differencing, estimate_full_matching
from .bench import (
    ESTIMATOR_NAMES,
    Knobs,
    RATE_EXPERIMENTS,
    read_dataset_csv,
    run_experiment,
    run_rate_experiment,
    query_grid,
    write_dataset_csv,
    write_estimates_csv,
    write_rate_csv,
    write_rate_report_csv,
    write_results_csv,
    write_summary_csv,
)
from .adversarial import fixed_adversary, indistinguishability_check, random_adversary
from .core import ConfigError, EstimationError, ObservationSet, as_seed
from .fixed_design import FixedConfig, GridDesign, default_bandwidth, estimate_fixed, weight_bound_sweep
from .holder import counterexample_intervals
from .random_design import RandomConfig, estimate_random, select_parameters
from .synth import ScenarioConfig, sample_scenario
from .theory import DENSITY_BOUND_CONSTANT, builtin_density_family, verify_minimal_inequality


def _load_scenario(path: str, seed_override) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    scenario = ScenarioConfig.from_json(text)
    if seed_override is not None:
        scenario = ScenarioConfig(
            design=scenario.design,
            mu0=scenario.mu0,
            tau=scenario.tau,
            sigma=scenario.sigma,
            n=scenario.n,
            d=scenario.d,
            kappa=scenario.kappa,
            seed=as_seed(seed_override),
        )
    return scenario


def _ensure_out(out: str) -> Path:
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _knob_options(fn):
    for decorator in (
        click.option("--beta-mu", type=float, default=1.0, show_default=True),
        click.option("--beta-tau", type=float, default=1.0, show_default=True),
        click.option("--bandwidth-const", type=float, default=1.0, show_default=True),
        click.option("--m1-const", type=float, default=1.0, show_default=True),
        click.option("--m2-const", type=float, default=1.0, show_default=True),
        click.option("--k-const", type=float, default=1.0, show_default=True),
    ):
        fn = decorator(fn)
    return fn


@click.group()
def cli():
    """Nonparametric treatment-effect estimation benchmark."""


@cli.command()
@click.option("--scenario", "scenario_path", required=True, help="Scenario JSON file.")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--replication", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, help="Output directory.")
def simulate(scenario_path, seed, replication, out_dir):
    """Sample one dataset and write it as CSV."""
    scenario = _load_scenario(scenario_path, seed)
    data = sample_scenario(scenario, replication=replication)
    out = _ensure_out(out_dir)
    write_dataset_csv(out / "dataset.csv", data)
    click.echo(f"wrote {out / 'dataset.csv'} ({data.n_control} control, {data.n_treatment} treatment)")


@cli.command()
@click.option("--data", "data_path", required=True, help="Dataset CSV file.")
@click.option("--estimator", "estimator_name", required=True, type=click.Choice(ESTIMATOR_NAMES))
@click.option("--m1", type=int, default=None, help="Stage-1 neighbors (default: auto; sqrt(n) for full_matching).")
@click.option("--m2", type=int, default=None)
@click.option("--k", type=int, default=None)
@click.option("--bandwidth", type=float, default=None)
@click.option("--grid-m", type=int, default=None, help="Grid size per axis (fixed_kernel).")
@click.option("--grid-shift", type=float, default=None, help="Treatment grid shift (fixed_kernel).")
@click.option("--beta-mu", type=float, default=1.0, show_default=True)
@click.option("--beta-tau", type=float, default=1.0, show_default=True)
@click.option("--kappa", type=float, default=1.0, show_default=True)
@click.option("--sigma", type=float, default=0.0, show_default=True, help="Assumed noise level for auto-tuning.")
@click.option("--query-grid", "query_grid_size", type=int, default=None, help="Query points per axis.")
@click.option("--out", "out_dir", required=True)
def estimate(data_path, estimator_name, m1, m2, k, bandwidth, grid_m, grid_shift,
             beta_mu, beta_tau, kappa, sigma, query_grid_size, out_dir):
    """Run one estimator on a dataset file and write its estimates."""
    data = read_dataset_csv(data_path)
    queries = query_grid(data.dimension, query_grid_size)
    n = data.n_control
    if estimator_name == "selected_matching":
        if m1 is None or m2 is None:
            sel = select_parameters(n, data.dimension, beta_mu, beta_tau, kappa, sigma)
            m1, m2 = (m1 or sel.m1), (m2 or sel.m2)
        estimates = estimate_random(data, RandomConfig(m1=m1, m2=m2, kappa=kappa), queries)
    elif estimator_name == "full_matching":
        estimates = estimate_full_matching(data, m1 or max(1, round(n ** 0.5)), queries)
    elif estimator_name == "knn_diff":
        if k is None:
            k = int(np.clip(round(n ** (2 * beta_mu / (2 * beta_mu + data.dimension))), 1, n))
        estimates = estimate_differencing(data, BaselineConfig(variant="knn_diff", k=k), queries)
    elif estimator_name == "kernel_diff":
        h = bandwidth or n ** (-1.0 / (2 * beta_mu + data.dimension))
        estimates = estimate_differencing(
            data, BaselineConfig(variant="kernel_diff", bandwidth=h), queries
        )
    else:
        if grid_m is None:
            raise ConfigError("fixed_kernel requires --grid-m (and optionally --grid-shift)")
        design = GridDesign(grid_m, (grid_shift or 0.0,) * data.dimension)
        h = bandwidth or default_bandwidth(n, data.dimension, beta_tau)
        estimates = estimate_fixed(
            data, design, FixedConfig(beta_mu=beta_mu, beta_tau=beta_tau, bandwidth=h), queries
        )
    out = _ensure_out(out_dir)
    write_estimates_csv(out / "estimates.csv", queries, estimates)
    click.echo(f"wrote {out / 'estimates.csv'} ({queries.shape[0]} queries)")


@cli.command()
@click.option("--scenario", "scenario_path", required=True, help="Scenario JSON file.")
@click.option("--seed", type=int, default=None, help="Override the scenario seed.")
@click.option("--reps", type=int, default=100, show_default=True)
@click.option("--estimators", default="selected_matching,full_matching,knn_diff,kernel_diff",
              show_default=True, help="Comma-separated estimator names.")
@click.option("--query-grid", "query_grid_size", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", "out_dir", required=True)
@_knob_options
def benchmark(scenario_path, seed, reps, estimators, query_grid_size, workers, out_dir,
              beta_mu, beta_tau, bandwidth_const, m1_const, m2_const, k_const):
    """Replicated estimator comparison; writes results.csv and summary.csv."""
    scenario = _load_scenario(scenario_path, seed)
    names = [s.strip() for s in estimators.split(",") if s.strip()]
    knobs = Knobs(beta_mu=beta_mu, beta_tau=beta_tau, bandwidth_const=bandwidth_const,
                  m1_const=m1_const, m2_const=m2_const, k_const=k_const)
    results = run_experiment(scenario, names, reps, query_grid_size, knobs, workers=workers)
    out = _ensure_out(out_dir)
    write_results_csv(out / "results.csv", results)
    write_summary_csv(out / "summary.csv", results)
    for res in results:
        click.echo(
            f"{res.estimator}: rmse={res.rmse:.6g} l1={res.l1_error:.6g} "
            f"({res.replications} reps)"
        )
        click.echo(f"  wall time {res.wall_time:.2f}s", err=True)
    click.echo(f"wrote {out / 'results.csv'} and {out / 'summary.csv'}")


@cli.command()
@click.option("--experiment", required=True, type=click.Choice(sorted(RATE_EXPERIMENTS)))
@click.option("--n-grid", default=None, help="Comma-separated sample sizes.")
@click.option("--reps", type=int, default=None, help="Replications per sample size.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--query-grid", "query_grid_size", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--out", "out_dir", required=True)
def rates(experiment, n_grid, reps, seed, query_grid_size, workers, out_dir):
    """n-sweep plus slope fit; writes rates.csv and rate_report.csv."""
    grid = [int(v) for v in n_grid.split(",")] if n_grid else None
    report, rows = run_rate_experiment(
        experiment, n_grid=grid, replications=reps, seed=seed,
        query_grid_size=query_grid_size, workers=workers,
    )
    out = _ensure_out(out_dir)
    write_rate_csv(out / "rates.csv", rows)
    write_rate_report_csv(out / "rate_report.csv", experiment, report)
    status = "PASS" if report.passed else "FAIL"
    click.echo(
        f"[{status}] {experiment}: slope={report.fitted_slope:.4f} "
        f"target={report.theoretical_exponent:.4f} tol={report.tolerance}"
    )
    if not report.passed:
        raise EstimationError(f"rate experiment {experiment} missed its exponent")


@cli.command("check-theory")
@click.option("--out", "out_dir", default=None, help="Optional report directory.")
@click.option("--seed", type=int, default=0, show_default=True)
def check_theory(out_dir, seed):
    """Run the numeric verification battery and print one line per check."""
    rows = []
    failures = 0

    def record(name, detail, ok):
        nonlocal failures
        rows.append({"check": name, "detail": detail, "pass": int(ok)})
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failures += 0 if ok else 1

    for density_name, density in builtin_density_family():
        for lam in (1.0, 10.0, 100.0, 1000.0):
            chk = verify_minimal_inequality(density, lam)
            record(
                "minimal-inequality",
                f"{density_name} lam={lam:g} lhs={chk.lhs:.3e} bound={chk.bound:.3e} "
                f"c={DENSITY_BOUND_CONSTANT}",
                chk.holds,
            )

    first, second = counterexample_intervals()
    ok = first == (0.625, 1.375) and second == (-0.375, 0.375) and first[1] > first[0] > second[1]
    record("divided-difference-intervals", f"{first} vs {second} (disjoint)", ok)

    sweep = weight_bound_sweep(1000, seed=seed)
    record(
        "weight-bounds",
        f"{sweep['draws']} draws, worst moment residual {sweep['worst_moment_residual']:.2e}",
        sweep["bounds_ok"] and sweep["worst_moment_residual"] <= 1e-10,
    )

    design = GridDesign(10, (0.05,))
    inst = fixed_adversary(design, beta_mu=0.5, beta_tau=1.0)
    grid_data = ObservationSet(
        design.control_points(), np.zeros(design.n), design.treatment_points(), np.zeros(design.n)
    )
    gap = indistinguishability_check(inst, grid_data)
    record(
        "grid-worst-case",
        f"violation={inst.certificate.max_constraint_violation:.2e} "
        f"objective={inst.certificate.objective:.3e} hidden={gap:.2e}",
        inst.certificate.max_constraint_violation <= 1e-9 and gap <= 1e-9,
    )

    rng = np.random.default_rng(seed)
    x0 = np.sort(rng.random(60))[:, None]
    x1 = np.sort(rng.random(60))[:, None]
    data = ObservationSet(x0, np.zeros(60), x1, np.zeros(60))
    rinst = random_adversary(data, beta_mu=1.0, beta_tau=1.0)
    rgap = indistinguishability_check(rinst, data)
    record(
        "random-worst-case",
        f"violation={rinst.certificate.max_constraint_violation:.2e} "
        f"objective={rinst.certificate.objective:.3e} hidden={rgap:.2e}",
        rinst.certificate.max_constraint_violation <= 1e-9 and rgap <= 1e-9,
    )

    if out_dir is not None:
        out = _ensure_out(out_dir)
        import csv as _csv

        with open(out / "theory_report.csv", "w", newline="") as fh:
            writer = _csv.DictWriter(fh, fieldnames=["check", "detail", "pass"])
            writer.writeheader()
            writer.writerows(rows)
        click.echo(f"wrote {out / 'theory_report.csv'}")
    if failures:
        raise EstimationError(f"{failures} theory checks failed")
    click.echo(f"all {len(rows)} checks passed (backend: {_backend.BACKEND})")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        return 1
    except (OSError, ValueError) as exc:
        click.echo(f"config error: {exc}", err=True)
        return 1
    except EstimationError as exc:
        click.echo(f"estimation error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
