"""Stochastic duration scenarios and train/validation/test datasets.

A scenario is one realized duration vector for an instance.  The default
generator draws each task duration from Normal(d, sqrt(d)) around the
instance's deterministic duration d, rounds half-up, and clamps to 1; tasks
with d = 0 (dummy milestones) stay at 0.  All generation is a pure function
of (instance, seed), so datasets are bit-reproducible.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .instance import Instance, Scenario

# Floor for per-task standard deviations: keeps the score function finite for
# tasks whose training durations are constant.
SIGMA_FLOOR = 1e-3

Sampler = Callable[[Instance, np.random.Generator], Scenario]


@dataclass(frozen=True)
class Dataset:
    train: tuple[Scenario, ...]
    validation: tuple[Scenario, ...]
    test: tuple[Scenario, ...]
    seed: int


@dataclass(frozen=True)
class BaseStats:
    """Per-task mean and population standard deviation of the train split."""

    means: tuple[float, ...]
    stddevs: tuple[float, ...]


def round_half_up(x: float) -> int:
    """Round to nearest integer with halves going up (5.5 -> 6)."""
    return math.floor(x + 0.5)


def sample_scenario(instance: Instance, rng: np.random.Generator) -> Scenario:
    """Draw one duration vector: Normal(d_j, sqrt(d_j)), rounded, clamped to 1."""
    durations = []
    for task in instance.tasks:
        if task.duration == 0:
            durations.append(0)
        else:
            g = rng.normal(task.duration, math.sqrt(task.duration))
            durations.append(max(1, round_half_up(g)))
    return Scenario(tuple(durations))


def uniform_sampler(halfwidths: Sequence[int]) -> Sampler:
    """Sampler drawing y_j uniformly from {d_j - h_j, ..., d_j + h_j}.

    A halfwidth of 0 keeps the task deterministic.  Used by the two-task
    demo instance, whose stochastic task follows a discrete uniform law.
    """

    def sample(instance: Instance, rng: np.random.Generator) -> Scenario:
        durations = []
        for task, h in zip(instance.tasks, halfwidths):
            if task.duration == 0:
                durations.append(0)
            elif h == 0:
                durations.append(task.duration)
            else:
                lo = max(1, task.duration - h)
                durations.append(int(rng.integers(lo, task.duration + h + 1)))
        return Scenario(tuple(durations))

    return sample


def make_dataset(
    instance: Instance,
    seed: int,
    sizes: tuple[int, int, int] = (100, 50, 50),
    sampler: Sampler | None = None,
) -> Dataset:
    """Generate train/validation/test splits from one seeded stream."""
    n_train, n_val, n_test = sizes
    if min(sizes) <= 0:
        raise ValueError(f"split sizes must be positive, got {sizes}")
    draw = sampler if sampler is not None else sample_scenario
    rng = np.random.default_rng(seed)
    train = tuple(draw(instance, rng) for _ in range(n_train))
    validation = tuple(draw(instance, rng) for _ in range(n_val))
    test = tuple(draw(instance, rng) for _ in range(n_test))
    return Dataset(train=train, validation=validation, test=test, seed=seed)


def base_stats(dataset: Dataset) -> BaseStats:
    """Mean and population stddev per task over the train split, floored.

    Tasks whose train durations are all zero are dummy milestones: their mean
    is 0 and their stddev is pinned to the floor.
    """
    if not dataset.train:
        raise ValueError("train split is empty")
    data = np.array([s.durations for s in dataset.train], dtype=float)
    means = data.mean(axis=0)
    stds = np.maximum(data.std(axis=0), SIGMA_FLOOR)
    return BaseStats(means=tuple(means.tolist()), stddevs=tuple(stds.tolist()))


def dataset_to_csv(dataset: Dataset, path) -> None:
    """One row per scenario: split label, index, then one column per task."""
    n = len(dataset.train[0]) if dataset.train else 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["split", "scenario"] + [f"task_{j}" for j in range(n)])
        for split in ("train", "validation", "test"):
            for i, scenario in enumerate(getattr(dataset, split)):
                writer.writerow([split, i] + list(scenario.durations))


def dataset_to_json(dataset: Dataset) -> str:
    payload = {
        "seed": dataset.seed,
        "train": [list(s.durations) for s in dataset.train],
        "validation": [list(s.durations) for s in dataset.validation],
        "test": [list(s.durations) for s in dataset.test],
    }
    return json.dumps(payload, indent=2)


def dataset_from_json(text: str) -> Dataset:
    payload = json.loads(text)
    return Dataset(
        train=tuple(Scenario(tuple(row)) for row in payload["train"]),
        validation=tuple(Scenario(tuple(row)) for row in payload["validation"]),
        test=tuple(Scenario(tuple(row)) for row in payload["test"]),
        seed=int(payload["seed"]),
    )


def dataset_from_csv(path) -> Dataset:
    """Rebuild splits from the CSV layout; the seed is not stored there."""
    splits: dict[str, list[Scenario]] = {"train": [], "validation": [], "test": []}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n = len(header) - 2
        for row in reader:
            split = row[0]
            splits[split].append(Scenario(tuple(int(v) for v in row[2 : 2 + n])))
    return Dataset(
        train=tuple(splits["train"]),
        validation=tuple(splits["validation"]),
        test=tuple(splits["test"]),
        seed=0,
    )
