"""Scikit-learn style estimators wrapping the three scheduling methods.

Each estimator is bound to an Instance, takes its hyperparameters in
``__init__`` (so ``get_params`` / ``set_params`` / ``clone`` compose with the
sklearn ecosystem), and learns from a 2-D array of historical duration
scenarios, one row per scenario and one column per task.  There are no
feature inputs in this setting, so ``predict`` takes no data: it returns the
estimator's duration prediction for the one bound instance.

All three expose ``schedule_`` after fitting, the first-stage start-time
decision to commit before durations are realized.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .dfl import TrainConfig, predict as point_estimate, train
from .instance import Instance, Scenario
from .saa import deterministic_baseline, solve_saa
from .scenarios import Dataset
from .scheduler import SolveBudget, solve_min_makespan


def _as_scenarios(X) -> tuple[Scenario, ...]:
    data = np.asarray(X)
    if data.ndim != 2:
        raise ValueError(f"expected a 2-D scenario array, got shape {data.shape}")
    return tuple(Scenario(tuple(int(v) for v in row)) for row in data)


def _train_dataset(X, seed: int) -> Dataset:
    scenarios = _as_scenarios(X)
    return Dataset(train=scenarios, validation=(), test=(), seed=seed)


class MeanDurationEstimator(BaseEstimator):
    """Deterministic baseline: schedule against rounded per-task mean durations."""

    def __init__(self, instance: Instance, budget: SolveBudget | None = None, seed: int = 0):
        self.instance = instance
        self.budget = budget
        self.seed = seed

    def fit(self, X, y=None):
        dataset = _train_dataset(X, self.seed)
        self.schedule_ = deterministic_baseline(
            self.instance, dataset, self.budget, seed=self.seed
        )
        self.prediction_ = self.schedule_.assumed_durations
        return self

    def predict(self):
        if not hasattr(self, "prediction_"):
            raise NotFittedError("call fit before predict")
        return np.asarray(self.prediction_.durations)


class SaaScheduleEstimator(BaseEstimator):
    """Scenario-programming baseline: first-stage starts optimized over scenarios.

    This method commits a start vector rather than a duration estimate, so it
    has no ``predict``; the fitted decision is ``schedule_``.
    """

    def __init__(
        self,
        instance: Instance,
        rho: float = 1.0,
        n_scenarios: int = 20,
        budget: SolveBudget | None = None,
        seed: int = 0,
        average_penalty: bool = False,
    ):
        self.instance = instance
        self.rho = rho
        self.n_scenarios = n_scenarios
        self.budget = budget
        self.seed = seed
        self.average_penalty = average_penalty

    def fit(self, X, y=None):
        scenarios = _as_scenarios(X)[: self.n_scenarios]
        self.solution_ = solve_saa(
            self.instance,
            list(scenarios),
            self.rho,
            self.budget,
            seed=self.seed,
            average_penalty=self.average_penalty,
        )
        self.schedule_ = self.solution_.first_stage
        return self


class ScoreGradientEstimator(BaseEstimator):
    """Trainable duration estimator optimized end-to-end on post-hoc regret."""

    def __init__(
        self,
        instance: Instance,
        learning_rate: float = 0.01,
        epochs: int = 20,
        batch_size: int = 1,
        samples_per_step: int = 1,
        rho: float = 1.0,
        budget: SolveBudget | None = None,
        seed: int = 0,
        use_baseline: bool = False,
    ):
        self.instance = instance
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.samples_per_step = samples_per_step
        self.rho = rho
        self.budget = budget
        self.seed = seed
        self.use_baseline = use_baseline

    def fit(self, X, y=None):
        dataset = _train_dataset(X, self.seed)
        config = TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            samples_per_step=self.samples_per_step,
            seed=self.seed,
            rho=self.rho,
            budget=self.budget or SolveBudget(),
            use_baseline=self.use_baseline,
        )
        self.params_, self.curve_ = train(self.instance, dataset, config)
        self.prediction_ = point_estimate(self.params_)
        self.schedule_ = solve_min_makespan(
            self.instance, self.prediction_, self.budget, seed=self.seed
        )
        return self

    def predict(self):
        if not hasattr(self, "prediction_"):
            raise NotFittedError("call fit before predict")
        return np.asarray(self.prediction_.durations)
