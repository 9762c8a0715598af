"""Scenario-based stochastic baseline: search over first-stage start vectors.

The first-stage decision is a vector of earliest-start commitments; recourse
under each scenario is the unit-postponement repair policy.  A candidate is
scored by the empirical objective

    mean over scenarios of realized makespan
    + rho * sum over scenarios of total postponement

(the penalty term is summed across scenarios by default; set
``average_penalty`` to divide it by the scenario count instead).

Candidates come from schedules solved against quantile mixes of the scenario
durations, refined by local moves on the start vector (single-start +/-1 and
whole-suffix shifts).  The same repair simulator scores the search and the
final evaluation, so there is no model/evaluation mismatch.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .instance import Instance, Scenario
from .scenarios import Dataset, base_stats, round_half_up
from .scheduler import Optimality, Schedule, SolveBudget, solve_min_makespan
from .simulate import simulate_repair

_QUANTILES = (0.0, 0.25, 0.5, 0.75, 0.9, 1.0)


@dataclass(frozen=True)
class SaaSolution:
    first_stage: Schedule
    objective: float
    mean_recourse_makespan: float
    n_scenarios: int
    # (candidate index, candidate objective, best objective so far)
    trace: tuple[tuple[int, float, float], ...] = ()


def saa_objective(
    instance: Instance,
    starts,
    scenarios,
    rho: float,
    average_penalty: bool = False,
) -> tuple[float, float]:
    """(objective, mean recourse makespan) of a start vector over scenarios."""
    total_makespan = 0
    total_deviation = 0
    for scenario in scenarios:
        corrected, makespan = simulate_repair(instance, starts, scenario)
        total_makespan += makespan
        total_deviation += sum(c - p for c, p in zip(corrected, starts))
    mean_makespan = total_makespan / len(scenarios)
    penalty = rho * total_deviation
    if average_penalty:
        penalty /= len(scenarios)
    return mean_makespan + penalty, mean_makespan


def solve_saa(
    instance: Instance,
    scenarios,
    rho: float,
    budget: SolveBudget | None = None,
    seed: int = 0,
    average_penalty: bool = False,
) -> SaaSolution:
    """Best first-stage start vector found within budget; deterministic per seed."""
    if not scenarios:
        raise ValueError("scenario list is empty")
    budget = budget or SolveBudget()
    matrix = np.array([s.durations for s in scenarios], dtype=float)
    dummy = matrix.max(axis=0) == 0

    candidates: list[tuple[int, ...]] = []
    mixes = [np.quantile(matrix, q, axis=0) for q in _QUANTILES]
    mixes.append(matrix.mean(axis=0))
    seen = set()
    for mix in mixes:
        durations = Scenario(
            tuple(
                0 if dummy[j] else max(1, round_half_up(float(mix[j])))
                for j in range(instance.n_tasks)
            )
        )
        if durations.durations in seen:
            continue
        seen.add(durations.durations)
        schedule = solve_min_makespan(instance, durations, budget, seed=seed)
        candidates.append(schedule.starts)

    best_starts: tuple[int, ...] | None = None
    best_objective = float("inf")
    best_mean = 0.0
    evaluations = 0
    trace: list[tuple[int, float, float]] = []

    def consider(starts: tuple[int, ...]) -> bool:
        nonlocal best_starts, best_objective, best_mean, evaluations
        evaluations += len(scenarios)
        objective, mean_makespan = saa_objective(
            instance, starts, scenarios, rho, average_penalty
        )
        improved = objective < best_objective
        if improved:
            best_starts = starts
            best_objective = objective
            best_mean = mean_makespan
        trace.append((len(trace), objective, best_objective))
        return improved

    for starts in candidates:
        consider(starts)
        if evaluations >= budget.node_limit:
            break

    improved = True
    while improved and evaluations < budget.node_limit:
        improved = False
        assert best_starts is not None
        for move in _local_moves(best_starts):
            if consider(move):
                improved = True
            if evaluations >= budget.node_limit:
                break

    assert best_starts is not None
    means = matrix.mean(axis=0)
    assumed = Scenario(
        tuple(
            0 if dummy[j] else max(1, round_half_up(float(means[j])))
            for j in range(instance.n_tasks)
        )
    )
    first_stage = Schedule(
        starts=best_starts,
        makespan=max((s + d for s, d in zip(best_starts, assumed)), default=0),
        assumed_durations=assumed,
        optimality=Optimality.HEURISTIC,
    )
    return SaaSolution(
        first_stage=first_stage,
        objective=best_objective,
        mean_recourse_makespan=best_mean,
        n_scenarios=len(scenarios),
        trace=tuple(trace),
    )


def deterministic_baseline(
    instance: Instance,
    dataset: Dataset,
    budget: SolveBudget | None = None,
    seed: int = 0,
) -> Schedule:
    """Schedule solved against the rounded per-task training means."""
    stats = base_stats(dataset)
    durations = Scenario(
        tuple(
            0 if mean == 0 else max(1, round_half_up(mean))
            for mean in stats.means
        )
    )
    return solve_min_makespan(instance, durations, budget, seed=seed)


def saa_trace_to_csv(solution: SaaSolution, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["candidate", "objective", "best_objective"])
        writer.writerows(solution.trace)


def saa_to_json(solution: SaaSolution) -> str:
    return json.dumps(
        {
            "starts": list(solution.first_stage.starts),
            "objective": solution.objective,
            "mean_recourse_makespan": solution.mean_recourse_makespan,
            "n_scenarios": solution.n_scenarios,
        },
        indent=2,
    )


def _local_moves(starts: tuple[int, ...]):
    n = len(starts)
    for j in range(n):
        plus = list(starts)
        plus[j] += 1
        yield tuple(plus)
        if starts[j] > 0:
            minus = list(starts)
            minus[j] -= 1
            yield tuple(minus)
    for s in sorted(set(starts)):
        shifted_up = tuple(z + 1 if z >= s else z for z in starts)
        yield shifted_up
        if s > 0:
            yield tuple(z - 1 if z >= s else z for z in starts)
