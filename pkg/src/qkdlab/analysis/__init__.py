"""Experiments, statistics, efficiency figures and the exact state checks."""

from .efficiency import (
    BB84,
    LUCAMARINI_MANCINI,
    REFERENCE_SCHEMES,
    THIS_SCHEME,
    EfficiencyInput,
    NoCrossingError,
    crossover_tau,
    efficiency,
    efficiency_table,
    practical_efficiency,
    tau_grid,
)
from .experiment import (
    DEFAULT_SEED,
    SCHEMA_VERSION,
    SEED_ENV,
    ExperimentPlan,
    ExperimentReport,
    TrialResult,
    aggregate,
    default_seed,
    detection_curve,
    run_experiment,
    run_trial,
    run_trials,
    trial_streams,
)
from .stats import RateEstimate, binomial_interval, clopper_pearson, normal_interval
from .verify import CHECKS, CheckResult, VerifyParams, run_checks

__all__ = [
    "BB84",
    "CHECKS",
    "DEFAULT_SEED",
    "LUCAMARINI_MANCINI",
    "REFERENCE_SCHEMES",
    "SCHEMA_VERSION",
    "SEED_ENV",
    "THIS_SCHEME",
    "CheckResult",
    "EfficiencyInput",
    "ExperimentPlan",
    "ExperimentReport",
    "NoCrossingError",
    "RateEstimate",
    "TrialResult",
    "VerifyParams",
    "aggregate",
    "binomial_interval",
    "clopper_pearson",
    "crossover_tau",
    "default_seed",
    "detection_curve",
    "efficiency",
    "efficiency_table",
    "normal_interval",
    "practical_efficiency",
    "run_checks",
    "run_experiment",
    "run_trial",
    "run_trials",
    "tau_grid",
    "trial_streams",
]
