"""Nonparametric heterogeneous treatment effect estimation and benchmarking.

Estimators for the two-groups potential-outcome model with a smooth effect
on top of rougher baselines: a grid-design interpolation/smoothing estimator,
a two-stage selected-matching estimator for sampled covariates, the usual
comparison baselines, worst-case instance generators, theoretical rate
oracles, and a reproducible Monte-Carlo harness.
"""

from ._backend import BACKEND
from .baselines import BaselineConfig, estimate_differencing, estimate_full_matching
from .core import (
    ConfigError,
    Covariate,
    EstimationError,
    HolderSpec,
    ObservationSet,
    RngSeed,
    euclidean_distance,
    k_nearest,
)
from .fixed_design import (
    FixedConfig,
    GridDesign,
    default_bandwidth,
    estimate_fixed,
    interpolation_weights,
    pseudo_observations,
    weight_bounds_check,
)
from .holder import (
    ValueSpec,
    counterexample_intervals,
    divided_difference,
    extend_holder,
    is_holder_feasible,
)
from .kernels import Kernel, kernel_eval, make_kernel
from .random_design import (
    MatchingDiagnostics,
    RandomConfig,
    RegimeSelection,
    estimate_random,
    matching_diagnostics,
    select_parameters,
)
from .synth import (
    FunctionSpec,
    PiecewiseDensity,
    RandomDesign,
    ScenarioConfig,
    reference_scenario,
    sample_scenario,
    two_level_density,
)
from .adversarial import (
    AdversarialInstance,
    fixed_adversary,
    indistinguishability_check,
    random_adversary,
)
from .theory import (
    RateInput,
    fixed_rate,
    minimal_function,
    random_rate,
    verify_minimal_inequality,
)
from .bench import (
    ExperimentResult,
    Knobs,
    RateReport,
    fit_rate,
    run_experiment,
    run_rate_experiment,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "AdversarialInstance",
    "BaselineConfig",
    "ConfigError",
    "Covariate",
    "EstimationError",
    "ExperimentResult",
    "FixedConfig",
    "FunctionSpec",
    "GridDesign",
    "HolderSpec",
    "Kernel",
    "Knobs",
    "MatchingDiagnostics",
    "ObservationSet",
    "PiecewiseDensity",
    "RandomConfig",
    "RandomDesign",
    "RateInput",
    "RateReport",
    "RegimeSelection",
    "RngSeed",
    "ScenarioConfig",
    "ValueSpec",
    "counterexample_intervals",
    "default_bandwidth",
    "divided_difference",
    "estimate_differencing",
    "estimate_fixed",
    "estimate_full_matching",
    "estimate_random",
    "euclidean_distance",
    "extend_holder",
    "fit_rate",
    "fixed_adversary",
    "fixed_rate",
    "indistinguishability_check",
    "interpolation_weights",
    "is_holder_feasible",
    "k_nearest",
    "kernel_eval",
    "make_kernel",
    "matching_diagnostics",
    "minimal_function",
    "pseudo_observations",
    "random_adversary",
    "random_rate",
    "reference_scenario",
    "run_experiment",
    "run_rate_experiment",
    "sample_scenario",
    "select_parameters",
    "two_level_density",
    "verify_minimal_inequality",
    "weight_bounds_check",
]
