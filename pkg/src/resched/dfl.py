"""Gradient training of a stochastic duration estimator on post-hoc regret.

The estimator is a per-task Normal distribution with trainable scale factors
on frozen training-data statistics: mu_j = theta_mu_j * mean_j and
sigma_j = max(theta_sigma_j * stddev_j, floor).  Because the scheduling loss
is a black box (solver plus repair simulation), its gradient is estimated
with the score function: the loss of a sampled prediction weighted by the
gradient of the sample's log-density.  The log-density is evaluated at the
continuous pre-rounding sample; rounding and clamping are treated as part of
the black-box loss.

Training runs plain stochastic gradient descent: per scenario, sample a
prediction, solve a schedule for it, execute the schedule under the true
scenario, and step the parameters against loss-weighted score gradients.
After training the estimator collapses to its mean: predictions are the
rounded mu vector.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .instance import Instance, Scenario
from .scenarios import SIGMA_FLOOR, BaseStats, Dataset, base_stats, round_half_up
from .scheduler import SolveBudget, solve_min_makespan
from .simulate import execute

# Positivity floor for the trainable scale factors.
THETA_MIN = 1e-2


@dataclass
class EstimatorParams:
    theta_mu: np.ndarray
    theta_sigma: np.ndarray
    base: BaseStats

    @classmethod
    def initial(cls, base: BaseStats) -> EstimatorParams:
        n = len(base.means)
        return cls(np.ones(n), np.ones(n), base)

    def mu(self) -> np.ndarray:
        return self.theta_mu * np.asarray(self.base.means)

    def sigma(self) -> np.ndarray:
        return np.maximum(self.theta_sigma * np.asarray(self.base.stddevs), SIGMA_FLOOR)

    def trainable_mask(self) -> np.ndarray:
        """Tasks that carry gradient signal.

        Dummy tasks (zero mean) contribute nothing, and tasks whose training
        durations were constant (stddev at the floor) are frozen: their score
        terms have unbounded variance and no information to extract.
        """
        means = np.asarray(self.base.means)
        stds = np.asarray(self.base.stddevs)
        return (means > 0) & (stds > SIGMA_FLOOR)


@dataclass
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 20
    batch_size: int = 1
    samples_per_step: int = 1
    seed: int = 0
    rho: float = 1.0
    budget: SolveBudget = field(default_factory=SolveBudget)
    use_baseline: bool = False

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ValueError("learning_rate must be nonnegative")
        if min(self.epochs, self.batch_size, self.samples_per_step) <= 0:
            raise ValueError("epochs, batch_size and samples_per_step must be positive")
        if self.rho < 0:
            raise ValueError("rho must be nonnegative")


def sample_continuous(
    params: EstimatorParams, rng: np.random.Generator, size: int | None = None
) -> np.ndarray:
    """Draw pre-rounding samples from the estimator; shape (n,) or (size, n)."""
    mu, sigma = params.mu(), params.sigma()
    if size is None:
        return rng.normal(mu, sigma)
    return rng.normal(mu, sigma, size=(size, len(mu)))


def sample_prediction(
    params: EstimatorParams, rng: np.random.Generator
) -> tuple[Scenario, np.ndarray]:
    """One duration prediction plus the continuous sample it was rounded from."""
    g = sample_continuous(params, rng)
    return _discretize(params, g), g


def predict(params: EstimatorParams) -> Scenario:
    """Point estimate: the rounded mean vector."""
    return _discretize(params, params.mu())


def score_gradient(params: EstimatorParams, g: np.ndarray, loss) -> tuple[np.ndarray, np.ndarray]:
    """Loss-weighted gradient of the sample's log-density w.r.t. the thetas.

    Supports a single sample (g of shape (n,), scalar loss) or a batch
    (g of shape (m, n), loss of shape (m,)); gradients match g's shape.
    """
    g = np.asarray(g, dtype=float)
    loss_arr = np.asarray(loss, dtype=float)
    if loss_arr.ndim == g.ndim - 1:
        loss_arr = loss_arr[..., None]
    mu, sigma = params.mu(), params.sigma()
    ybar = np.asarray(params.base.means)
    sbar = np.asarray(params.base.stddevs)
    centered = g - mu
    grad_mu = loss_arr * ybar * centered / sigma**2
    grad_sigma = loss_arr * sbar * (centered**2 - sigma**2) / sigma**3
    mask = params.trainable_mask()
    return np.where(mask, grad_mu, 0.0), np.where(mask, grad_sigma, 0.0)


def train(
    instance: Instance, dataset: Dataset, config: TrainConfig
) -> tuple[EstimatorParams, list[float]]:
    """Run the training loop; returns final parameters and per-epoch mean loss.

    Each step samples a prediction, solves a schedule for it, executes that
    schedule under one training scenario, and takes a gradient step on the
    resulting post-hoc regret.  Perfect-information makespans per training
    scenario are cached, since they do not depend on the parameters.
    """
    if not dataset.train:
        raise ValueError("train split is empty")
    params = EstimatorParams.initial(base_stats(dataset))
    rng = np.random.default_rng(config.seed)
    n_train = len(dataset.train)
    star_makespans: dict[tuple[int, ...], int] = {}
    curve: list[float] = []
    baseline = 0.0
    seen = 0

    for _ in range(config.epochs):
        order = rng.permutation(n_train)
        epoch_losses: list[float] = []
        for lo in range(0, n_train, config.batch_size):
            batch = order[lo : lo + config.batch_size]
            grad_mu = np.zeros(instance.n_tasks)
            grad_sigma = np.zeros(instance.n_tasks)
            draws = 0
            for i in batch:
                scenario = dataset.train[int(i)]
                key = scenario.durations
                if key not in star_makespans:
                    star = solve_min_makespan(instance, scenario, config.budget, config.seed)
                    star_makespans[key] = star.makespan
                for _ in range(config.samples_per_step):
                    predicted, g = sample_prediction(params, rng)
                    schedule = solve_min_makespan(
                        instance, predicted, config.budget, config.seed
                    )
                    result = execute(instance, schedule, scenario, config.rho)
                    loss = (
                        result.realized_makespan - star_makespans[key] + result.penalty
                    )
                    if not math.isfinite(loss):
                        raise RuntimeError(
                            f"non-finite training loss {loss} for prediction "
                            f"{predicted.durations}"
                        )
                    epoch_losses.append(loss)
                    effective = loss - baseline if config.use_baseline else loss
                    gm, gs = score_gradient(params, g, effective)
                    grad_mu += gm
                    grad_sigma += gs
                    draws += 1
                    seen += 1
                    baseline += (loss - baseline) / seen
            params.theta_mu = np.maximum(
                params.theta_mu - config.learning_rate * grad_mu / draws, THETA_MIN
            )
            params.theta_sigma = np.maximum(
                params.theta_sigma - config.learning_rate * grad_sigma / draws, THETA_MIN
            )
        curve.append(sum(epoch_losses) / len(epoch_losses))
    return params, curve


def params_to_json(params: EstimatorParams) -> str:
    return json.dumps(
        {
            "theta_mu": params.theta_mu.tolist(),
            "theta_sigma": params.theta_sigma.tolist(),
            "base_means": list(params.base.means),
            "base_stddevs": list(params.base.stddevs),
        },
        indent=2,
    )


def params_from_json(text: str) -> EstimatorParams:
    payload = json.loads(text)
    base = BaseStats(
        means=tuple(payload["base_means"]), stddevs=tuple(payload["base_stddevs"])
    )
    return EstimatorParams(
        theta_mu=np.asarray(payload["theta_mu"], dtype=float),
        theta_sigma=np.asarray(payload["theta_sigma"], dtype=float),
        base=base,
    )


def curve_to_csv(curve: list[float], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "mean_pregret"])
        for e, value in enumerate(curve):
            writer.writerow([e, value])


def _discretize(params: EstimatorParams, values: np.ndarray) -> Scenario:
    means = np.asarray(params.base.means)
    durations = tuple(
        0 if means[j] == 0 else max(1, round_half_up(float(values[j])))
        for j in range(len(means))
    )
    return Scenario(durations)
