"""Discrete-event execution of a first-stage schedule under realized durations.

The repair policy is repeated one-unit postponement: a task whose planned
start has been reached attempts to begin; it actually starts only if all of
its predecessor constraints hold under the realized durations and every
demanded resource has capacity over the task's whole realized duration
(calendar windows included).  Otherwise its start slips by one time unit and
it tries again.  A task, once started, runs to completion; a failed attempt
consumes neither time nor capacity.

Contention is resolved deterministically: at every time step the ready tasks
attempt in ascending order of (planned start, task id), i.e. the task that
has been waiting longest goes first.  This first-come, first-served rule is
what makes a task that was postponed from an early planned start win the
resource over a task whose plan happens to release at the current instant.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

from .instance import Instance, Scenario, horizon_bound, predecessor_map
from .scheduler import Schedule


@dataclass(frozen=True)
class ExecutionResult:
    corrected_starts: tuple[int, ...]
    realized_makespan: int
    deviation_sum: int
    penalty: float


def simulate_repair(
    instance: Instance, planned_starts, realized: Scenario
) -> tuple[tuple[int, ...], int]:
    """Run the postponement policy; return (corrected starts, makespan)."""
    n = instance.n_tasks
    y = list(realized)
    z = list(planned_starts)
    if len(z) != n or len(y) != n:
        raise ValueError("planned starts and realized durations must match task count")
    if n == 0:
        return (), 0

    horizon = horizon_bound(instance, y, extra=max(z))
    avail = [[r.capacity] * horizon for r in instance.resources]
    for win in instance.unavailability:
        row = avail[win.resource]
        for t in range(win.start, min(win.end, horizon)):
            row[t] = 0

    preds = predecessor_map(instance)
    demands = [
        [(r, q) for r, q in enumerate(task.demands) if q > 0]
        for task in instance.tasks
    ]
    pending = sorted(range(n), key=lambda j: (z[j], j))
    started: dict[int, int] = {}

    def attempt(j: int, t: int) -> bool:
        for p, lag in preds[j]:
            if p not in started:
                return False
            if lag is None:
                if started[p] + y[p] > t:
                    return False
            elif started[p] + lag > t:
                return False
        if t + y[j] > horizon:
            raise RuntimeError(f"task {j} cannot start within horizon {horizon}")
        for r, q in demands[j]:
            row = avail[r]
            for tau in range(t, t + y[j]):
                if row[tau] < q:
                    return False
        return True

    t = 0
    while pending:
        if t >= horizon:
            raise RuntimeError("repair simulation exceeded its horizon")
        any_started = True
        while any_started:
            any_started = False
            for j in list(pending):
                if z[j] > t:
                    continue
                if attempt(j, t):
                    started[j] = t
                    for r, q in demands[j]:
                        row = avail[r]
                        for tau in range(t, t + y[j]):
                            row[tau] -= q
                    pending.remove(j)
                    any_started = True
        if not pending:
            break
        t = _next_event(t, z, y, started, pending, instance, horizon)

    corrected = tuple(started[j] for j in range(n))
    makespan = max(started[j] + y[j] for j in range(n))
    return corrected, makespan


def execute(
    instance: Instance, first_stage: Schedule, realized: Scenario, rho: float = 0.0
) -> ExecutionResult:
    """Execute a first-stage schedule under one realization.

    The penalty is ``rho`` times the total postponement, i.e. the sum over
    tasks of (corrected start - planned start).
    """
    if rho < 0:
        raise ValueError(f"penalty coefficient must be nonnegative, got {rho}")
    corrected, makespan = simulate_repair(instance, first_stage.starts, realized)
    deviation = sum(c - p for c, p in zip(corrected, first_stage.starts))
    return ExecutionResult(
        corrected_starts=corrected,
        realized_makespan=makespan,
        deviation_sum=deviation,
        penalty=rho * deviation,
    )


def expected_execution(
    instance: Instance,
    first_stage: Schedule,
    scenarios,
    rho: float = 0.0,
) -> tuple[float, float]:
    """Mean realized makespan and mean penalty over a scenario batch."""
    if not scenarios:
        raise ValueError("scenario list is empty")
    results = [execute(instance, first_stage, s, rho) for s in scenarios]
    mean_makespan = sum(r.realized_makespan for r in results) / len(results)
    mean_penalty = sum(r.penalty for r in results) / len(results)
    return mean_makespan, mean_penalty


def execution_to_json(result: ExecutionResult) -> str:
    return json.dumps(
        {
            "corrected_starts": list(result.corrected_starts),
            "realized_makespan": result.realized_makespan,
            "deviation_sum": result.deviation_sum,
            "penalty": result.penalty,
        },
        indent=2,
    )


def executions_to_csv(instance_name: str, results: list[ExecutionResult], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["instance", "scenario", "makespan", "deviation_sum"])
        for i, r in enumerate(results):
            writer.writerow([instance_name, i, r.realized_makespan, r.deviation_sum])


def _next_event(t, z, y, started, pending, instance, horizon) -> int:
    """Earliest time after t at which any attempt outcome can change."""
    candidates = [horizon]
    for j in pending:
        if z[j] > t:
            candidates.append(z[j])
    for p, s in started.items():
        if s + y[p] > t:
            candidates.append(s + y[p])
        for edge in instance.tasks[p].successors:
            if edge.min_lag is not None and s + edge.min_lag > t:
                candidates.append(s + edge.min_lag)
    for win in instance.unavailability:
        if win.start > t:
            candidates.append(win.start)
        if win.end > t:
            candidates.append(win.end)
    return min(candidates)
