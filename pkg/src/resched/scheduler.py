"""Minimum-makespan scheduling under precedence, lags, capacities and calendars.

The workhorse is the serial schedule generation scheme (SGS): given a
precedence-feasible priority order, each task is placed at the earliest start
where its predecessors' constraints hold and every demanded resource has
capacity over the task's whole duration.  ``solve_min_makespan`` searches over
priority decisions: depth-first branch-and-bound with a critical-path lower
bound for small instances (exact over the space of serial-SGS schedules), and
multi-start priority sampling plus swap local search for larger ones.

Everything is deterministic given (inputs, budget, seed); ties are broken by
ascending task id.
"""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass

import numpy as np

from .instance import Instance, Scenario, horizon_bound, predecessor_map, topological_order


class Optimality(enum.Enum):
    EXACT = "exact"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class Schedule:
    starts: tuple[int, ...]
    makespan: int
    assumed_durations: Scenario
    optimality: Optimality


@dataclass(frozen=True)
class SolveBudget:
    """Search limits: node_limit counts individual task placements.

    ``time_limit`` (seconds) is a wall-clock safety valve; leave it None for
    strictly reproducible results, since a timer-triggered cutoff may fire at
    a different node from run to run.
    """

    node_limit: int = 1_000_000
    time_limit: float | None = None
    exact_threshold: int = 10

    def __post_init__(self):
        if self.node_limit <= 0 or self.exact_threshold <= 0:
            raise ValueError("budget limits must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


class _BudgetExhausted(Exception):
    pass


class _Budget:
    def __init__(self, budget: SolveBudget):
        self.remaining = budget.node_limit
        self.deadline = (
            time.monotonic() + budget.time_limit if budget.time_limit else None
        )

    def spend(self, nodes: int = 1) -> None:
        self.remaining -= nodes
        if self.remaining < 0:
            raise _BudgetExhausted
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _BudgetExhausted


class _Placer:
    """Incremental resource availability over a fixed horizon, with undo."""

    def __init__(self, instance: Instance, durations):
        horizon = horizon_bound(instance, durations)
        self.avail = [[r.capacity] * horizon for r in instance.resources]
        for win in instance.unavailability:
            row = self.avail[win.resource]
            for t in range(win.start, min(win.end, horizon)):
                row[t] = 0
        self.demands = [
            [(r, q) for r, q in enumerate(task.demands) if q > 0]
            for task in instance.tasks
        ]
        self.durations = list(durations)
        self.horizon = horizon

    def earliest_start(self, j: int, bound: int) -> int:
        d = self.durations[j]
        if d == 0:
            return bound
        needs = self.demands[j]
        t = bound
        while True:
            if t + d > self.horizon:
                raise RuntimeError(
                    f"no feasible start for task {j} within horizon {self.horizon}"
                )
            conflict = -1
            for r, q in needs:
                row = self.avail[r]
                for tau in range(t, t + d):
                    if row[tau] < q:
                        conflict = max(conflict, tau)
                        break
            if conflict < 0:
                return t
            t = conflict + 1

    def place(self, j: int, start: int) -> None:
        d = self.durations[j]
        for r, q in self.demands[j]:
            row = self.avail[r]
            for tau in range(start, start + d):
                row[tau] -= q

    def unplace(self, j: int, start: int) -> None:
        d = self.durations[j]
        for r, q in self.demands[j]:
            row = self.avail[r]
            for tau in range(start, start + d):
                row[tau] += q


def _precedence_bound(j, starts, preds, durations) -> int:
    bound = 0
    for p, lag in preds[j]:
        if lag is None:
            bound = max(bound, starts[p] + durations[p])
        else:
            bound = max(bound, starts[p] + lag)
    return bound


def sgs_serial(instance: Instance, durations: Scenario, priority: list[int]) -> Schedule:
    """Serial SGS: place tasks in priority order, each at its earliest start.

    The priority list must be a precedence-feasible permutation of all task
    ids; raises ValueError otherwise.
    """
    n = instance.n_tasks
    if sorted(priority) != list(range(n)):
        raise ValueError("priority is not a permutation of all task ids")
    position = {j: i for i, j in enumerate(priority)}
    for task in instance.tasks:
        for edge in task.successors:
            if position[task.id] > position[edge.task]:
                raise ValueError(
                    f"priority is not topological: task {task.id} after its "
                    f"successor {edge.task}"
                )

    placer = _Placer(instance, durations)
    preds = predecessor_map(instance)
    starts = [0] * n
    makespan = 0
    for j in priority:
        bound = _precedence_bound(j, starts, preds, placer.durations)
        start = placer.earliest_start(j, bound)
        placer.place(j, start)
        starts[j] = start
        makespan = max(makespan, start + placer.durations[j])
    return Schedule(
        starts=tuple(starts),
        makespan=makespan,
        assumed_durations=durations,
        optimality=Optimality.HEURISTIC,
    )


def solve_min_makespan(
    instance: Instance,
    durations: Scenario,
    budget: SolveBudget | None = None,
    seed: int = 0,
) -> Schedule:
    """Best-effort minimum-makespan schedule for the given duration vector.

    Small instances (up to ``budget.exact_threshold`` tasks) are solved by
    exhaustive branch-and-bound over serial-SGS priority decisions; the result
    is flagged Exact when the search completes.  Larger instances, or searches
    that hit the budget, fall back to multi-start priority sampling with swap
    local search and are flagged Heuristic.
    """
    budget = budget or SolveBudget()
    n = instance.n_tasks
    if len(durations) != n:
        raise ValueError("duration vector length does not match task count")
    if n == 0:
        return Schedule((), 0, durations, Optimality.EXACT)

    meter = _Budget(budget)
    best: Schedule | None = None
    if n <= budget.exact_threshold:
        best, complete = _branch_and_bound(instance, durations, meter)
        if complete:
            return best

    return _multi_start(instance, durations, meter, seed, incumbent=best)


def schedule_to_json(schedule: Schedule) -> str:
    return json.dumps(
        {
            "starts": list(schedule.starts),
            "makespan": schedule.makespan,
            "assumed_durations": list(schedule.assumed_durations.durations),
            "optimality": schedule.optimality.value,
        },
        indent=2,
    )


def schedule_from_json(text: str) -> Schedule:
    payload = json.loads(text)
    return Schedule(
        starts=tuple(payload["starts"]),
        makespan=int(payload["makespan"]),
        assumed_durations=Scenario(tuple(payload["assumed_durations"])),
        optimality=Optimality(payload["optimality"]),
    )


# --- exact search -----------------------------------------------------------


def _branch_and_bound(instance, durations, meter) -> tuple[Schedule | None, bool]:
    """DFS over eligible-task choices; returns (best schedule, completed?)."""
    n = instance.n_tasks
    preds = predecessor_map(instance)
    placer = _Placer(instance, durations)
    topo = topological_order(instance)
    succ = [[(e.task, e.min_lag) for e in t.successors] for t in instance.tasks]

    starts = [-1] * n
    pending = [len(preds[j]) for j in range(n)]
    best_schedule: Schedule | None = None
    best_value = [float("inf")]

    def lower_bound(makespan: int) -> int:
        est = [0] * n
        for j in topo:
            if starts[j] >= 0:
                continue
            bound = 0
            for p, lag in preds[j]:
                if starts[p] >= 0:
                    base = starts[p] + (placer.durations[p] if lag is None else lag)
                else:
                    base = est[p] + (placer.durations[p] if lag is None else lag)
                bound = max(bound, base)
            est[j] = bound
        lb = makespan
        for j in range(n):
            if starts[j] < 0:
                lb = max(lb, est[j] + placer.durations[j])
        return lb

    def dfs(placed: int, makespan: int) -> None:
        if placed == n:
            if makespan < best_value[0]:
                best_value[0] = makespan
                best_schedule_tuple[0] = tuple(starts)
            return
        if lower_bound(makespan) >= best_value[0]:
            return
        for j in range(n):
            if starts[j] >= 0 or pending[j] > 0:
                continue
            meter.spend()
            bound = _precedence_bound(j, starts, preds, placer.durations)
            start = placer.earliest_start(j, bound)
            placer.place(j, start)
            starts[j] = start
            for s, _ in succ[j]:
                pending[s] -= 1
            dfs(placed + 1, max(makespan, start + placer.durations[j]))
            for s, _ in succ[j]:
                pending[s] += 1
            starts[j] = -1
            placer.unplace(j, start)

    best_schedule_tuple: list[tuple[int, ...] | None] = [None]
    try:
        dfs(0, 0)
        completed = True
    except _BudgetExhausted:
        completed = False

    if best_schedule_tuple[0] is not None:
        best_schedule = Schedule(
            starts=best_schedule_tuple[0],
            makespan=int(best_value[0]),
            assumed_durations=durations,
            optimality=Optimality.EXACT if completed else Optimality.HEURISTIC,
        )
    return best_schedule, completed


# --- heuristic search -------------------------------------------------------


def _rule_priority(instance, durations, key) -> list[int]:
    """Topological order choosing, among ready tasks, the one minimizing key."""
    n = instance.n_tasks
    indegree = [0] * n
    for task in instance.tasks:
        for edge in task.successors:
            indegree[edge.task] += 1
    ready = [j for j in range(n) if indegree[j] == 0]
    order = []
    while ready:
        j = min(ready, key=key)
        ready.remove(j)
        order.append(j)
        for edge in instance.tasks[j].successors:
            indegree[edge.task] -= 1
            if indegree[edge.task] == 0:
                ready.append(edge.task)
    return order


def _latest_start_times(instance, durations) -> list[int]:
    n = instance.n_tasks
    topo = topological_order(instance)
    est = [0] * n
    preds = predecessor_map(instance)
    for j in topo:
        for p, lag in preds[j]:
            est[j] = max(est[j], est[p] + (durations[p] if lag is None else lag))
    horizon = max((est[j] + durations[j] for j in range(n)), default=0)
    lst = [horizon - durations[j] for j in range(n)]
    for j in reversed(topo):
        for edge in instance.tasks[j].successors:
            if edge.min_lag is None:
                lst[j] = min(lst[j], lst[edge.task] - durations[j])
            else:
                lst[j] = min(lst[j], lst[edge.task] - edge.min_lag)
    return lst


def _random_topological(instance, rng) -> list[int]:
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


def _is_topological(instance, priority) -> bool:
    position = {j: i for i, j in enumerate(priority)}
    for task in instance.tasks:
        for edge in task.successors:
            if position[task.id] > position[edge.task]:
                return False
    return True


def _multi_start(instance, durations, meter, seed, incumbent=None) -> Schedule:
    n = instance.n_tasks
    rng = np.random.default_rng(seed)
    dur = list(durations)

    best = incumbent
    best_priority: list[int] | None = None

    def consider(priority) -> bool:
        nonlocal best, best_priority
        meter.spend(n)
        schedule = sgs_serial(instance, durations, priority)
        if best is None or schedule.makespan < best.makespan:
            best = schedule
            best_priority = list(priority)
            return True
        return False

    lst = _latest_start_times(instance, dur)
    n_succ = [len(t.successors) for t in instance.tasks]
    rules = [
        lambda j: j,
        lambda j: (lst[j], j),
        lambda j: (lst[j] + dur[j], j),
        lambda j: (-n_succ[j], j),
    ]
    try:
        for key in rules:
            consider(_rule_priority(instance, dur, key))
        for _ in range(max(4, 2 * n)):
            consider(_random_topological(instance, rng))
        # swap local search around the best priority found so far
        while best_priority is not None:
            improved = False
            for _ in range(4 * n):
                i, j = sorted(int(v) for v in rng.integers(n, size=2))
                if i == j:
                    continue
                candidate = list(best_priority)
                candidate[i], candidate[j] = candidate[j], candidate[i]
                if not _is_topological(instance, candidate):
                    continue
                if consider(candidate):
                    improved = True
            if not improved:
                break
    except _BudgetExhausted:
        pass

    if best is None:
        # budget too small for a single SGS pass; fall back to one id-order run
        best = sgs_serial(instance, durations, topological_order(instance))
    return Schedule(
        starts=best.starts,
        makespan=best.makespan,
        assumed_durations=durations,
        optimality=Optimality.HEURISTIC,
    )
