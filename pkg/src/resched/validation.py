"""Independent feasibility checks for schedules and executed schedules.

These checks recompute resource usage from scratch with plain time loops and
share no bookkeeping with the scheduler's incremental placement or with the
repair simulator, so they can serve as a second opinion on both.
"""

from __future__ import annotations

from .instance import Instance


def check_schedule(instance: Instance, durations, starts) -> list[str]:
    """All constraint violations of a start-time vector under given durations.

    Checks precedence (finish-to-start and start-to-start min-lags), resource
    capacities at every occupied time step, calendar windows, and basic shape.
    Returns an empty list when the schedule is feasible.
    """
    violations: list[str] = []
    n = instance.n_tasks
    if len(starts) != n or len(durations) != n:
        return [f"expected {n} starts and durations, got {len(starts)}/{len(durations)}"]

    for j in range(n):
        if starts[j] < 0:
            violations.append(f"task {j}: negative start {starts[j]}")

    for task in instance.tasks:
        j = task.id
        for edge in task.successors:
            i = edge.task
            if edge.min_lag is None:
                if starts[i] < starts[j] + durations[j]:
                    violations.append(
                        f"task {i} starts at {starts[i]} before task {j} "
                        f"finishes at {starts[j] + durations[j]}"
                    )
            elif starts[i] < starts[j] + edge.min_lag:
                violations.append(
                    f"task {i} starts at {starts[i]} before min-lag "
                    f"{edge.min_lag} after task {j} at {starts[j]}"
                )

    end = max((starts[j] + durations[j] for j in range(n)), default=0)
    for res in instance.resources:
        blocked = set()
        for win in instance.unavailability:
            if win.resource == res.id:
                blocked.update(range(win.start, win.end))
        for t in range(end):
            used = sum(
                task.demands[res.id]
                for task in instance.tasks
                if starts[task.id] <= t < starts[task.id] + durations[task.id]
            )
            if t in blocked:
                if used > 0:
                    violations.append(
                        f"resource {res.id} used ({used}) during unavailability at t={t}"
                    )
            elif used > res.capacity:
                violations.append(
                    f"resource {res.id} over capacity at t={t}: {used} > {res.capacity}"
                )
    return violations


def check_execution(
    instance: Instance, planned_starts, realized, corrected_starts
) -> list[str]:
    """Violations of an executed schedule relative to its first-stage plan.

    Corrected starts must never precede the planned starts, and the executed
    schedule must be feasible under the realized durations.
    """
    violations = []
    for j, (z, zc) in enumerate(zip(planned_starts, corrected_starts)):
        if zc < z:
            violations.append(f"task {j}: corrected start {zc} before planned {z}")
    violations.extend(check_schedule(instance, list(realized), corrected_starts))
    return violations


def can_start_at(instance: Instance, durations, started: dict[int, int], j: int, t: int) -> bool:
    """Whether task j may begin at time t given tasks already started.

    ``started`` maps task ids to their (fixed) start times.  The test covers
    the predecessor constraints of j and resource capacity over j's whole
    duration, counting running tasks and calendar windows.  Used by the
    brute-force repair oracle.
    """
    for task in instance.tasks:
        for edge in task.successors:
            if edge.task != j:
                continue
            p = task.id
            if edge.min_lag is None:
                if p not in started or started[p] + durations[p] > t:
                    return False
            elif p not in started or started[p] + edge.min_lag > t:
                return False
    d = durations[j]
    demands = instance.tasks[j].demands
    for res in instance.resources:
        q = demands[res.id]
        if q == 0:
            continue
        for tau in range(t, t + d):
            used = q
            for k, s in started.items():
                if k != j and s <= tau < s + durations[k]:
                    used += instance.tasks[k].demands[res.id]
            if used > res.capacity:
                return False
            for win in instance.unavailability:
                if win.resource == res.id and win.start <= tau < win.end:
                    return False
    return True
