"""Stochastic resource-constrained project scheduling with repair.

Parse instances, generate duration scenarios, compute schedules, simulate the
unit-postponement repair policy under realized durations, evaluate post-hoc
regret, and compare three first-stage decision methods: scheduling on mean
durations, scenario-based stochastic programming, and a duration estimator
trained end-to-end with score-function gradients.
"""

__version__ = "0.1.0"

from .instance import (
    Instance,
    ResourceDef,
    Scenario,
    Successor,
    Task,
    UnavailabilityWindow,
    topological_order,
    validate,
)
from .parsing import ParseError, ParseReport, instance_to_json, parse_json, parse_sm
from .scenarios import BaseStats, Dataset, base_stats, make_dataset, sample_scenario
from .scheduler import Optimality, Schedule, SolveBudget, sgs_serial, solve_min_makespan
from .simulate import ExecutionResult, execute, expected_execution
from .regret import RegretRecord, evaluate_method, paired_t_test, post_hoc_regret
from .dfl import EstimatorParams, TrainConfig, predict, sample_prediction, score_gradient, train
from .saa import SaaSolution, deterministic_baseline, solve_saa
from .estimators import MeanDurationEstimator, SaaScheduleEstimator, ScoreGradientEstimator
from .experiment import ExperimentConfig, report, run_experiment

__all__ = [
    "BaseStats",
    "Dataset",
    "EstimatorParams",
    "ExecutionResult",
    "ExperimentConfig",
    "Instance",
    "MeanDurationEstimator",
    "Optimality",
    "ParseError",
    "ParseReport",
    "RegretRecord",
    "ResourceDef",
    "SaaScheduleEstimator",
    "SaaSolution",
    "Scenario",
    "Schedule",
    "ScoreGradientEstimator",
    "SolveBudget",
    "Successor",
    "Task",
    "TrainConfig",
    "UnavailabilityWindow",
    "base_stats",
    "deterministic_baseline",
    "evaluate_method",
    "execute",
    "expected_execution",
    "instance_to_json",
    "make_dataset",
    "paired_t_test",
    "parse_json",
    "parse_sm",
    "post_hoc_regret",
    "predict",
    "report",
    "run_experiment",
    "sample_prediction",
    "sample_scenario",
    "score_gradient",
    "sgs_serial",
    "solve_min_makespan",
    "solve_saa",
    "topological_order",
    "train",
    "validate",
]
