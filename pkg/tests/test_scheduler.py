from __future__ import annotations

import numpy as np
import pytest

from resched.instance import Instance, ResourceDef, Scenario, Successor, Task, topological_order
from resched.scheduler import (
    Optimality,
    SolveBudget,
    schedule_from_json,
    schedule_to_json,
    sgs_serial,
    solve_min_makespan,
)
from resched.toy import toy_instance
from resched.validation import check_schedule
from helpers import brute_force_min_makespan, random_instance, random_scenario


def test_sgs_chain():
    inst = Instance(
        tasks=(
            Task(0, 3, (1,), (Successor(1),)),
            Task(1, 2, (1,)),
        ),
        resources=(ResourceDef(0, 1),),
    )
    s = sgs_serial(inst, Scenario((3, 2)), [0, 1])
    assert s.starts == (0, 3)
    assert s.makespan == 5


def test_sgs_toy_priorities():
    inst = toy_instance()
    long_first = sgs_serial(inst, Scenario((4, 5)), [1, 0])
    assert long_first.starts == (10, 0)
    assert long_first.makespan == 14
    short_first = sgs_serial(inst, Scenario((4, 5)), [0, 1])
    assert short_first.starts == (0, 10)
    assert short_first.makespan == 15


def test_sgs_rejects_bad_priorities():
    inst = toy_instance()
    with pytest.raises(ValueError, match="permutation"):
        sgs_serial(inst, Scenario((4, 5)), [0, 0])
    chain = Instance(
        tasks=(Task(0, 1, (), (Successor(1),)), Task(1, 1, ())),
        resources=(),
    )
    with pytest.raises(ValueError, match="topological"):
        sgs_serial(chain, Scenario((1, 1)), [1, 0])


def test_sgs_zero_durations_zero_makespan():
    rng = np.random.default_rng(3)
    for _ in range(30):
        inst = random_instance(rng, allow_minlag=False)
        zeros = Scenario((0,) * inst.n_tasks)
        s = sgs_serial(inst, zeros, topological_order(inst))
        assert s.makespan == 0


def test_solve_toy_mean_durations():
    s = solve_min_makespan(toy_instance(), Scenario((4, 5)))
    assert s.makespan == 14
    assert s.starts == (10, 0)
    assert s.optimality is Optimality.EXACT


def test_solve_single_task():
    inst = Instance(tasks=(Task(0, 7, (1,)),), resources=(ResourceDef(0, 1),))
    s = solve_min_makespan(inst, Scenario((7,)))
    assert s.starts == (0,)
    assert s.makespan == 7
    assert s.optimality is Optimality.EXACT


def test_solve_matches_brute_force_on_small_instances():
    rng = np.random.default_rng(21)
    for _ in range(25):
        inst = random_instance(rng)
        durations = random_scenario(rng, inst)
        found = solve_min_makespan(inst, durations)
        assert found.optimality is Optimality.EXACT
        assert found.makespan == brute_force_min_makespan(inst, durations)


def test_exact_makespan_is_relabeling_invariant():
    rng = np.random.default_rng(5)
    for _ in range(10):
        inst = random_instance(rng, max_tasks=5)
        durations = random_scenario(rng, inst)
        base = solve_min_makespan(inst, durations).makespan

        perm = list(rng.permutation(inst.n_tasks))
        inv = {old: new for new, old in enumerate(perm)}
        tasks = []
        for new_id, old_id in enumerate(perm):
            old = inst.tasks[old_id]
            tasks.append(
                Task(
                    id=new_id,
                    duration=old.duration,
                    demands=old.demands,
                    successors=tuple(
                        Successor(inv[e.task], e.min_lag) for e in old.successors
                    ),
                )
            )
        relabeled = Instance(
            tasks=tuple(tasks),
            resources=inst.resources,
            unavailability=inst.unavailability,
        )
        shuffled = Scenario(tuple(durations[old] for old in perm))
        assert solve_min_makespan(relabeled, shuffled).makespan == base


def test_every_schedule_passes_independent_checker():
    rng = np.random.default_rng(8)
    for _ in range(50):
        inst = random_instance(rng)
        durations = random_scenario(rng, inst)
        s = solve_min_makespan(inst, durations)
        assert check_schedule(inst, list(durations), list(s.starts)) == []


def test_heuristic_path_on_larger_instance():
    rng = np.random.default_rng(13)
    inst = random_instance(rng, max_tasks=15, allow_minlag=False)
    while inst.n_tasks <= 11:
        inst = random_instance(rng, max_tasks=15, allow_minlag=False)
    durations = random_scenario(rng, inst)
    s = solve_min_makespan(inst, durations, SolveBudget(node_limit=5000))
    assert s.optimality is Optimality.HEURISTIC
    assert check_schedule(inst, list(durations), list(s.starts)) == []


def test_solver_is_deterministic():
    rng = np.random.default_rng(17)
    inst = random_instance(rng, max_tasks=12)
    durations = random_scenario(rng, inst)
    a = solve_min_makespan(inst, durations, SolveBudget(node_limit=3000), seed=4)
    b = solve_min_makespan(inst, durations, SolveBudget(node_limit=3000), seed=4)
    assert a == b


def test_schedule_json_round_trip():
    s = solve_min_makespan(toy_instance(), Scenario((4, 5)))
    again = schedule_from_json(schedule_to_json(s))
    assert again == s
