"""Monte-Carlo benchmark harness.

Runs replicated experiments against synthetic scenarios, reports RMSE and
density-weighted L1 errors on a uniform query grid, fits empirical log-log
error rates against theoretical exponents, and reads/writes the CSV formats
used by the command line.

Reproducibility contract: identical scenario JSON plus seed yields
byte-identical CSV output. Replications may execute on a worker pool; each
one derives its own substreams from the scenario seed and aggregation runs
in a fixed order, so parallelism never changes results. Wall times are
reported to stderr only, never written into result files.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .adversarial import fixed_adversary
from .baselines import BaselineConfig, estimate_differencing, estimate_full_matching
from .core import ConfigError, EstimationError, ObservationSet
from .fixed_design import FixedConfig, GridDesign, default_bandwidth, estimate_fixed
from .random_design import RandomConfig, estimate_random, select_parameters
from .synth import (
    FunctionSpec,
    RandomDesign,
    ScenarioConfig,
    build_function,
    reference_scenario,
    sample_scenario,
)

ESTIMATOR_NAMES = (
    "selected_matching",
    "full_matching",
    "knn_diff",
    "kernel_diff",
    "fixed_kernel",
)

_DEFAULT_QUERY_POINTS = {1: 512, 2: 64}


@dataclass(frozen=True)
class Knobs:
    """Free constants in the theoretical tuning rules, exposed as multipliers."""

    beta_mu: float = 1.0
    beta_tau: float = 1.0
    bandwidth_const: float = 1.0
    m1_const: float = 1.0
    m2_const: float = 1.0
    k_const: float = 1.0


@dataclass(frozen=True)
class ResolvedEstimator:
    name: str
    params: Dict
    run: Callable[[ObservationSet, np.ndarray], np.ndarray]

    @property
    def digest(self) -> str:
        doc = json.dumps({"name": self.name, "params": self.params}, sort_keys=True)
        return hashlib.sha256(doc.encode()).hexdigest()[:12]


def resolve_estimator(
    name: str, scenario: ScenarioConfig, knobs: Knobs = Knobs()
) -> ResolvedEstimator:
    """Bind an estimator name to concrete tuning for one scenario.

    Tuning follows the theoretical bias-variance balances with unit
    constants (scaled by the knob multipliers): the two-stage estimator via
    the regime rule, full matching via the no-discard balance, differencing
    via the baseline-smoothness rules.
    """
    n, d, sigma, kappa = scenario.n, scenario.d, scenario.sigma, scenario.kappa
    bm, bt = knobs.beta_mu, knobs.beta_tau
    if name == "selected_matching":
        sel = select_parameters(
            n, d, bm, bt, kappa, sigma, m1_const=knobs.m1_const, m2_const=knobs.m2_const
        )
        config = RandomConfig(m1=min(sel.m1, n), m2=sel.m2, kappa=kappa)
        return ResolvedEstimator(
            name,
            {"m1": config.m1, "m2": config.m2, "regime": sel.regime},
            lambda data, q: estimate_random(data, config, q),
        )
    if name == "full_matching":
        raw = n ** (2.0 * bt / (2.0 * bt + d)) * sigma ** (2.0 * d / (2.0 * bt + d))
        m1 = int(np.clip(math.floor(knobs.m1_const * raw + 0.5), 1, n))
        return ResolvedEstimator(
            name, {"m1": m1}, lambda data, q: estimate_full_matching(data, m1, q)
        )
    if name == "knn_diff":
        k = int(np.clip(math.floor(knobs.k_const * n ** (2.0 * bm / (2.0 * bm + d)) + 0.5), 1, n))
        config = BaselineConfig(variant="knn_diff", k=k)
        return ResolvedEstimator(
            name, {"k": k}, lambda data, q: estimate_differencing(data, config, q)
        )
    if name == "kernel_diff":
        h = float(np.clip(knobs.bandwidth_const * n ** (-1.0 / (2.0 * bm + d)), 1e-6, 0.999))
        config = BaselineConfig(variant="kernel_diff", bandwidth=h)
        return ResolvedEstimator(
            name, {"bandwidth": h}, lambda data, q: estimate_differencing(data, config, q)
        )
    if name == "fixed_kernel":
        if not isinstance(scenario.design, GridDesign):
            raise ConfigError("fixed_kernel requires a grid-design scenario")
        h = float(np.clip(knobs.bandwidth_const * default_bandwidth(n, d, bt), 1e-6, 0.999))
        config = FixedConfig(beta_mu=bm, beta_tau=bt, bandwidth=h)
        design = scenario.design
        return ResolvedEstimator(
            name,
            {"bandwidth": h, "t": config.t},
            lambda data, q: estimate_fixed(data, design, config, q),
        )
    raise ConfigError(f"unknown estimator {name!r}; choose from {ESTIMATOR_NAMES}")


def query_grid(d: int, points_per_axis: Optional[int] = None) -> np.ndarray:
    """Uniform tensor grid of query points covering [0, 1]^d."""
    q = points_per_axis or _DEFAULT_QUERY_POINTS.get(d, max(2, int(round(512 ** (1.0 / d)))))
    axes = [np.linspace(0.0, 1.0, q)] * d
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


@dataclass(frozen=True)
class ExperimentResult:
    """Aggregated error of one estimator on one scenario."""

    scenario: str
    estimator: str
    estimator_digest: str
    replications: int
    rmse: float
    l1_error: float
    per_replication: Tuple[float, ...]
    per_replication_l1: Tuple[float, ...]
    wall_time: float


def _replication_errors(scenario, est_specs, queries, truth, weights, rep):
    data = sample_scenario(scenario, replication=rep)
    out = []
    for est in est_specs:
        t0 = time.perf_counter()
        try:
            estimate = np.asarray(est.run(data, queries), dtype=float)
        except (ConfigError, EstimationError) as exc:
            raise EstimationError(
                f"estimator {est.name!r} failed on replication {rep}: {exc}"
            ) from exc
        elapsed = time.perf_counter() - t0
        err = estimate - truth
        mse = float(np.mean(err**2))
        l1 = float(np.sum(weights * np.abs(err)) / np.sum(weights))
        out.append((mse, l1, elapsed))
    return out


def _resolve_worker(scenario_doc, names, knobs, queries, truth, weights, rep):
    scenario = ScenarioConfig.from_dict(scenario_doc)
    est_specs = [resolve_estimator(nm, scenario, knobs) for nm in names]
    return _replication_errors(scenario, est_specs, queries, truth, weights, rep)


def run_experiment(
    scenario: ScenarioConfig,
    estimators: Sequence[Union[str, ResolvedEstimator]],
    replications: int,
    query_grid_size: Optional[int] = None,
    knobs: Knobs = Knobs(),
    workers: int = 1,
) -> List[ExperimentResult]:
    """Replicated comparison of estimators on one scenario.

    Each replication samples a fresh dataset from the scenario's derived
    substreams and evaluates every estimator on the same uniform query grid;
    the L1 error is reweighted by the control density. Deterministic given
    the scenario seed, regardless of worker count.
    """
    if replications < 1:
        raise ConfigError("need at least one replication")
    est_specs = [
        e if isinstance(e, ResolvedEstimator) else resolve_estimator(e, scenario, knobs)
        for e in estimators
    ]
    queries = query_grid(scenario.d, query_grid_size)
    truth = np.asarray(build_function(scenario.tau)(queries), dtype=float)
    if isinstance(scenario.design, RandomDesign):
        weights = scenario.design.g0.pdf(queries[:, 0])
    else:
        weights = np.ones(queries.shape[0])

    per_rep: List[List[Tuple[float, float, float]]] = []
    if workers > 1:
        names = [e for e in estimators if isinstance(e, str)]
        if len(names) != len(est_specs):
            raise ConfigError("worker pools require estimators given by name")
        doc = scenario.to_dict()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_resolve_worker, doc, names, knobs, queries, truth, weights, rep)
                for rep in range(replications)
            ]
            per_rep = [f.result() for f in futures]
    else:
        for rep in range(replications):
            per_rep.append(
                _replication_errors(scenario, est_specs, queries, truth, weights, rep)
            )

    results = []
    digest = scenario.digest()
    for j, est in enumerate(est_specs):
        mses = [per_rep[r][j][0] for r in range(replications)]
        l1s = [per_rep[r][j][1] for r in range(replications)]
        elapsed = sum(per_rep[r][j][2] for r in range(replications))
        results.append(
            ExperimentResult(
                scenario=digest,
                estimator=est.name,
                estimator_digest=est.digest,
                replications=replications,
                rmse=float(math.sqrt(sum(mses) / replications)),
                l1_error=float(sum(l1s) / replications),
                per_replication=tuple(float(math.sqrt(m)) for m in mses),
                per_replication_l1=tuple(float(v) for v in l1s),
                wall_time=elapsed,
            )
        )
    return results


# ---------------------------------------------------------------------------
# Rate fitting


@dataclass(frozen=True)
class RateReport:
    """Least-squares log-log slope of error against n, compared with a
    theoretical exponent at a fixed tolerance."""

    grid: Tuple[Tuple[int, float], ...]
    fitted_slope: float
    theoretical_exponent: float
    tolerance: float
    passed: bool


def fit_rate(
    grid: Sequence[Tuple[int, float]], theoretical_exponent: float, tolerance: float
) -> RateReport:
    """Fit log(error) against log(n) by least squares.

    Requires at least four distinct sample sizes spanning a decade, and
    strictly positive errors.
    """
    ns = np.asarray([float(n) for n, _ in grid])
    errs = np.asarray([float(e) for _, e in grid])
    if np.unique(ns).size < 4:
        raise ConfigError("need at least 4 distinct n values")
    if ns.max() / ns.min() < 10.0:
        raise ConfigError("n grid must span at least one decade")
    if errs.min() <= 0.0:
        raise ConfigError("errors must be positive for a log-log fit")
    slope = float(np.polyfit(np.log(ns), np.log(errs), 1)[0])
    return RateReport(
        grid=tuple((int(n), float(e)) for n, e in grid),
        fitted_slope=slope,
        theoretical_exponent=float(theoretical_exponent),
        tolerance=float(tolerance),
        passed=bool(abs(slope - theoretical_exponent) <= tolerance),
    )


@dataclass(frozen=True)
class RateExperiment:
    """An n-sweep whose mean L1 error should follow a known exponent."""

    name: str
    exponent: float
    tolerance: float
    n_grid: Tuple[int, ...]
    replications: int
    estimator: str
    knobs: Knobs
    build_scenario: Callable[[int, int], ScenarioConfig] = field(repr=False)


def _fixed_bias_scenario(n: int, seed: int) -> ScenarioConfig:
    # Worst-case grid-aligned instance: the matching bias has constant sign,
    # so smoothing cannot average it away and the error tracks the bias term.
    design = GridDesign(n, (0.5 / n,))
    inst = fixed_adversary(design, beta_mu=0.5, beta_tau=1.0)
    return ScenarioConfig(
        design=design, mu0=inst.mu0, tau=inst.tau, sigma=0.0, n=n, d=1, kappa=1.0, seed=seed
    )


def _fixed_noise_scenario(n: int, seed: int) -> ScenarioConfig:
    return ScenarioConfig(
        design=GridDesign(n, (0.0,)),
        mu0=FunctionSpec("reference_mu0"),
        tau=FunctionSpec("reference_tau"),
        sigma=1.0,
        n=n,
        d=1,
        kappa=1.0,
        seed=seed,
    )


def _random_noise_scenario(n: int, seed: int) -> ScenarioConfig:
    return reference_scenario(n, 1, 1.0, seed, sigma=1.0)


RATE_EXPERIMENTS: Dict[str, RateExperiment] = {
    "fixed-bias": RateExperiment(
        name="fixed-bias",
        exponent=-0.5,
        tolerance=0.15,
        n_grid=(100, 400, 1600, 6400),
        replications=50,
        estimator="fixed_kernel",
        knobs=Knobs(beta_mu=0.5, beta_tau=1.0),
        build_scenario=_fixed_bias_scenario,
    ),
    "fixed-noise": RateExperiment(
        name="fixed-noise",
        exponent=-1.0 / 3.0,
        tolerance=0.15,
        n_grid=(100, 400, 1600, 6400),
        replications=50,
        estimator="fixed_kernel",
        knobs=Knobs(beta_mu=1.0, beta_tau=1.0),
        build_scenario=_fixed_noise_scenario,
    ),
    "random-high-noise": RateExperiment(
        name="random-high-noise",
        exponent=-1.0 / 3.0,
        tolerance=0.15,
        n_grid=(250, 500, 1000, 2000, 4000),
        replications=30,
        estimator="selected_matching",
        knobs=Knobs(beta_mu=1.0, beta_tau=1.0),
        build_scenario=_random_noise_scenario,
    ),
}


def run_rate_experiment(
    name: str,
    n_grid: Optional[Sequence[int]] = None,
    replications: Optional[int] = None,
    seed: int = 0,
    query_grid_size: Optional[int] = None,
    workers: int = 1,
) -> Tuple[RateReport, List[dict]]:
    """Run one named n-sweep and fit its slope. Returns the report and one
    row per n for the CSV output."""
    if name not in RATE_EXPERIMENTS:
        raise ConfigError(
            f"unknown rate experiment {name!r}; choose from {sorted(RATE_EXPERIMENTS)}"
        )
    exp = RATE_EXPERIMENTS[name]
    ns = tuple(int(v) for v in (n_grid or exp.n_grid))
    reps = int(replications or exp.replications)
    rows = []
    grid = []
    for n in ns:
        scenario = exp.build_scenario(n, seed)
        (result,) = run_experiment(
            scenario,
            [exp.estimator],
            reps,
            query_grid_size=query_grid_size,
            knobs=exp.knobs,
            workers=workers,
        )
        grid.append((n, result.l1_error))
        rows.append(
            {
                "experiment": name,
                "n": n,
                "replications": reps,
                "estimator": exp.estimator,
                "l1_error": result.l1_error,
                "rmse": result.rmse,
            }
        )
    report = fit_rate(grid, exp.exponent, exp.tolerance)
    return report, rows


def bootstrap_mean_quantile(
    values: Sequence[float], q: float, draws: int = 2000, seed: int = 0
) -> float:
    """Quantile of the bootstrap distribution of the sample mean."""
    vals = np.asarray(values, dtype=float)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, vals.size, size=(draws, vals.size))
    return float(np.quantile(vals[idx].mean(axis=1), q))


# ---------------------------------------------------------------------------
# CSV I/O


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_dataset_csv(path, data: ObservationSet):
    """Dataset file: one row per observation, columns group, x_1..x_d, y."""
    header = ["group"] + [f"x_{j + 1}" for j in range(data.dimension)] + ["y"]
    rows = []
    for group, xs, ys in ((0, data.control_x, data.control_y), (1, data.treatment_x, data.treatment_y)):
        for x, y in zip(xs, ys):
            rows.append([group] + [repr(float(c)) for c in x] + [repr(float(y))])
    _write_csv(path, header, rows)


def read_dataset_csv(path) -> ObservationSet:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "group" or header[-1] != "y":
            raise ConfigError(f"{path}: not a dataset file")
        d = len(header) - 2
        control, treatment = [], []
        for row in reader:
            if len(row) != d + 2:
                raise ConfigError(f"{path}: malformed row {row}")
            group = row[0]
            x = [float(v) for v in row[1:-1]]
            y = float(row[-1])
            if group == "0":
                control.append((x, y))
            elif group == "1":
                treatment.append((x, y))
            else:
                raise ConfigError(f"{path}: group must be 0 or 1, got {group!r}")
    if not control or not treatment:
        raise ConfigError(f"{path}: both groups must be present")
    return ObservationSet.from_pairs(control, treatment)


def write_results_csv(path, results: Sequence[ExperimentResult]):
    """One row per (estimator, replication); deterministic byte-for-byte."""
    header = ["scenario", "estimator", "estimator_digest", "replication", "rmse", "l1_error"]
    rows = []
    for res in results:
        for rep, (rm, l1) in enumerate(zip(res.per_replication, res.per_replication_l1)):
            rows.append([res.scenario, res.estimator, res.estimator_digest, rep, repr(rm), repr(l1)])
    _write_csv(path, header, rows)


def write_summary_csv(path, results: Sequence[ExperimentResult]):
    header = ["scenario", "estimator", "estimator_digest", "replications", "rmse", "l1_error"]
    rows = [
        [r.scenario, r.estimator, r.estimator_digest, r.replications, repr(r.rmse), repr(r.l1_error)]
        for r in results
    ]
    _write_csv(path, header, rows)


def write_rate_csv(path, rows: Sequence[dict]):
    header = ["experiment", "n", "replications", "estimator", "l1_error", "rmse"]
    _write_csv(
        path,
        header,
        [[r["experiment"], r["n"], r["replications"], r["estimator"], repr(r["l1_error"]), repr(r["rmse"])] for r in rows],
    )


def write_rate_report_csv(path, name: str, report: RateReport):
    header = ["experiment", "fitted_slope", "theoretical_exponent", "tolerance", "pass"]
    _write_csv(
        path,
        header,
        [[name, repr(report.fitted_slope), repr(report.theoretical_exponent), repr(report.tolerance), int(report.passed)]],
    )


def write_estimates_csv(path, queries: np.ndarray, estimates: np.ndarray):
    d = queries.shape[1]
    header = [f"x_{j + 1}" for j in range(d)] + ["estimate"]
    rows = [
        [repr(float(c)) for c in q] + [repr(float(e))] for q, e in zip(queries, estimates)
    ]
    _write_csv(path, header, rows)
