"""Shared test utilities: random instances and brute-force oracles.

The oracles deliberately take the dumbest correct route (full enumeration,
quadratic rescans via the independent feasibility checker) so they share no
shortcuts with the code they cross-check.
"""

from __future__ import annotations

import numpy as np

from resched.instance import Instance, ResourceDef, Scenario, Successor, Task, UnavailabilityWindow
from resched.scheduler import sgs_serial
from resched.validation import can_start_at


def random_instance(
    rng: np.random.Generator,
    max_tasks: int = 6,
    allow_minlag: bool = True,
    allow_windows: bool = True,
    allow_zero_duration: bool = True,
) -> Instance:
    n = int(rng.integers(1, max_tasks + 1))
    n_res = int(rng.integers(1, 3))
    caps = [int(rng.integers(1, 5)) for _ in range(n_res)]

    tasks = []
    for j in range(n):
        low = 0 if allow_zero_duration else 1
        duration = int(rng.integers(low, 7))
        demands = tuple(int(rng.integers(0, caps[r] + 1)) for r in range(n_res))
        successors = []
        for i in range(j + 1, n):
            if rng.random() < 0.35:
                if allow_minlag and rng.random() < 0.25:
                    successors.append(Successor(i, min_lag=int(rng.integers(0, 6))))
                else:
                    successors.append(Successor(i))
        tasks.append(Task(id=j, duration=duration, demands=demands, successors=tuple(successors)))

    windows = []
    if allow_windows and rng.random() < 0.5:
        for _ in range(int(rng.integers(1, 3))):
            start = int(rng.integers(0, 10))
            windows.append(
                UnavailabilityWindow(
                    resource=int(rng.integers(0, n_res)),
                    start=start,
                    end=start + int(rng.integers(1, 5)),
                )
            )

    return Instance(
        tasks=tuple(tasks),
        resources=tuple(ResourceDef(r, caps[r]) for r in range(n_res)),
        unavailability=tuple(windows),
    )


def random_scenario(rng: np.random.Generator, instance: Instance) -> Scenario:
    return Scenario(
        tuple(
            0 if t.duration == 0 else max(1, t.duration + int(rng.integers(-2, 3)))
            for t in instance.tasks
        )
    )


def random_topological_order(rng: np.random.Generator, instance: Instance) -> list[int]:
    n = instance.n_tasks
    indegree = [0] * n
    for task in instance.tasks:
        for edge in task.successors:
            indegree[edge.task] += 1
    ready = sorted(j for j in range(n) if indegree[j] == 0)
    order = []
    while ready:
        j = ready.pop(int(rng.integers(len(ready))))
        order.append(j)
        for edge in instance.tasks[j].successors:
            indegree[edge.task] -= 1
            if indegree[edge.task] == 0:
                ready.append(edge.task)
    return order


def all_topological_orders(instance: Instance):
    """Yield every precedence-feasible permutation of the task ids."""
    n = instance.n_tasks
    indegree = [0] * n
    for task in instance.tasks:
        for edge in task.successors:
            indegree[edge.task] += 1

    order: list[int] = []

    def extend():
        if len(order) == n:
            yield list(order)
            return
        for j in range(n):
            if indegree[j] == 0 and j not in order:
                order.append(j)
                for edge in instance.tasks[j].successors:
                    indegree[edge.task] -= 1
                yield from extend()
                for edge in instance.tasks[j].successors:
                    indegree[edge.task] += 1
                order.pop()

    yield from extend()


def brute_force_min_makespan(instance: Instance, durations: Scenario) -> int:
    """Minimum makespan over every topological priority fed to serial SGS."""
    best = None
    for priority in all_topological_orders(instance):
        makespan = sgs_serial(instance, durations, priority).makespan
        if best is None or makespan < best:
            best = makespan
    assert best is not None
    return best


def repair_oracle(
    instance: Instance, planned, realized: Scenario, horizon: int
) -> tuple[int, ...]:
    """Brute-force reference for the repair policy.

    Scans every time step, attempting tasks in (planned start, id) order with
    the independent feasibility checker, then verifies minimality: no task
    could have started at any earlier step given what had started by then.
    """
    n = instance.n_tasks
    y = list(realized)
    order = sorted(range(n), key=lambda j: (planned[j], j))
    started: dict[int, int] = {}
    for t in range(horizon + 1):
        changed = True
        while changed:
            changed = False
            for j in order:
                if j in started or planned[j] > t:
                    continue
                if can_start_at(instance, y, started, j, t):
                    started[j] = t
                    changed = True
        if len(started) == n:
            break
    assert len(started) == n, f"oracle did not finish within horizon {horizon}"

    # minimal postponement: every earlier start must have been infeasible
    for j in range(n):
        for t in range(planned[j], started[j]):
            visible = {
                k: s
                for k, s in started.items()
                if s < t or (s == t and (planned[k], k) < (planned[j], j))
            }
            assert not can_start_at(instance, y, visible, j, t), (
                f"task {j} could have started at {t} < {started[j]}"
            )
    return tuple(started[j] for j in range(n))
