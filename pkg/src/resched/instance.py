"""Core domain types for resource-constrained project scheduling instances.

An instance is a set of tasks with precedence relations, a set of renewable
resources with fixed capacities, and optional calendar windows during which a
resource is fully unavailable (e.g. planned maintenance).  Time is discrete:
durations, lags and window bounds are integer time units.

All types are frozen dataclasses; instances are immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Successor:
    """Precedence edge to a successor task.

    ``min_lag is None`` means finish-to-start: the successor may start only
    after this task finishes.  Otherwise the edge is a start-to-start minimum
    lag: ``start(successor) >= start(task) + min_lag``.  Each edge carries
    exactly one of the two semantics.
    """

    task: int
    min_lag: int | None = None


@dataclass(frozen=True)
class Task:
    id: int
    duration: int
    demands: tuple[int, ...]
    successors: tuple[Successor, ...] = ()


@dataclass(frozen=True)
class ResourceDef:
    id: int
    capacity: int


@dataclass(frozen=True)
class UnavailabilityWindow:
    """Half-open interval [start, end) during which a resource is blocked.

    A blocked resource has zero usable capacity: no task with a positive
    demand on it may be running at any time inside the window.
    """

    resource: int
    start: int
    end: int


@dataclass(frozen=True)
class Instance:
    tasks: tuple[Task, ...]
    resources: tuple[ResourceDef, ...]
    unavailability: tuple[UnavailabilityWindow, ...] = ()

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)

    @property
    def n_resources(self) -> int:
        return len(self.resources)

    def __repr__(self) -> str:
        return (
            f"Instance({self.n_tasks} tasks, {self.n_resources} resources, "
            f"{len(self.unavailability)} windows)"
        )


@dataclass(frozen=True)
class Scenario:
    """One realized duration vector, aligned with ``Instance.tasks``."""

    durations: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.durations)

    def __getitem__(self, j: int) -> int:
        return self.durations[j]

    def __iter__(self):
        return iter(self.durations)


def validate(instance: Instance) -> list[str]:
    """Check all structural invariants; return a description per violation.

    An empty list means the instance is valid.  Violations are data, not
    errors: callers decide whether to raise.
    """
    violations: list[str] = []
    n = instance.n_tasks
    r = instance.n_resources

    for idx, task in enumerate(instance.tasks):
        where = f"task {task.id}"
        if task.id != idx:
            violations.append(f"{where}: id does not match position {idx}")
        if task.duration < 0:
            violations.append(f"{where}: negative duration {task.duration}")
        if len(task.demands) != r:
            violations.append(
                f"{where}: {len(task.demands)} demand entries for {r} resources"
            )
        for rid, demand in enumerate(task.demands):
            if demand < 0:
                violations.append(f"{where}: negative demand on resource {rid}")
            elif rid < r and demand > instance.resources[rid].capacity:
                violations.append(
                    f"{where}: demand {demand} exceeds capacity "
                    f"{instance.resources[rid].capacity} of resource {rid}"
                )
        seen: set[int] = set()
        for edge in task.successors:
            if not 0 <= edge.task < n:
                violations.append(f"{where}: successor {edge.task} out of range")
            elif edge.task in seen:
                violations.append(f"{where}: duplicate successor {edge.task}")
            else:
                seen.add(edge.task)
            if edge.min_lag is not None and edge.min_lag < 0:
                violations.append(
                    f"{where}: negative min-lag {edge.min_lag} to task {edge.task}"
                )

    for idx, res in enumerate(instance.resources):
        if res.id != idx:
            violations.append(f"resource {res.id}: id does not match position {idx}")
        if res.capacity < 1:
            violations.append(f"resource {res.id}: capacity {res.capacity} < 1")

    for w, win in enumerate(instance.unavailability):
        if not 0 <= win.resource < r:
            violations.append(f"window {w}: resource {win.resource} out of range")
        if win.start < 0:
            violations.append(f"window {w}: negative start {win.start}")
        if win.start >= win.end:
            violations.append(f"window {w}: empty interval [{win.start}, {win.end})")

    cycle = _find_cycle_member(instance)
    if cycle is not None:
        violations.append(f"cycle detected in precedence graph through task {cycle}")

    return violations


def topological_order(instance: Instance) -> list[int]:
    """Return task ids in a precedence-respecting order, ties by ascending id.

    Raises ValueError naming a cycle member if the graph is not a DAG.
    """
    n = instance.n_tasks
    indegree = [0] * n
    for task in instance.tasks:
        for edge in task.successors:
            if 0 <= edge.task < n:
                indegree[edge.task] += 1

    ready = sorted(j for j in range(n) if indegree[j] == 0)
    order: list[int] = []
    while ready:
        j = ready.pop(0)
        order.append(j)
        inserted = False
        for edge in instance.tasks[j].successors:
            indegree[edge.task] -= 1
            if indegree[edge.task] == 0:
                ready.append(edge.task)
                inserted = True
        if inserted:
            ready.sort()
    if len(order) < n:
        member = next(j for j in range(n) if indegree[j] > 0)
        raise ValueError(f"precedence graph has a cycle through task {member}")
    return order


def predecessor_map(instance: Instance) -> list[list[tuple[int, int | None]]]:
    """Per task, the list of (predecessor id, min_lag) pairs pointing at it."""
    preds: list[list[tuple[int, int | None]]] = [[] for _ in range(instance.n_tasks)]
    for task in instance.tasks:
        for edge in task.successors:
            preds[edge.task].append((task.id, edge.min_lag))
    return preds


def horizon_bound(instance: Instance, durations, extra: int = 0) -> int:
    """A time by which every task can certainly have started and finished."""
    total = sum(durations) + sum(
        e.min_lag for t in instance.tasks for e in t.successors if e.min_lag
    )
    window_end = max((w.end for w in instance.unavailability), default=0)
    return total + window_end + extra + 1


def _find_cycle_member(instance: Instance) -> int | None:
    n = instance.n_tasks
    indegree = [0] * n
    for task in instance.tasks:
        for edge in task.successors:
            if 0 <= edge.task < n:
                indegree[edge.task] += 1
    ready = [j for j in range(n) if indegree[j] == 0]
    removed = 0
    while ready:
        j = ready.pop()
        removed += 1
        for edge in instance.tasks[j].successors:
            if 0 <= edge.task < n:
                indegree[edge.task] -= 1
                if indegree[edge.task] == 0:
                    ready.append(edge.task)
    if removed == n:
        return None
    return next(j for j in range(n) if indegree[j] > 0)
