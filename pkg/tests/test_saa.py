from __future__ import annotations

import json

import numpy as np
import pytest

from resched.instance import Scenario
from resched.saa import deterministic_baseline, saa_objective, saa_to_json, solve_saa
from resched.scenarios import Dataset
from resched.scheduler import solve_min_makespan
from resched.simulate import simulate_repair
from resched.toy import toy_instance, toy_scenarios
from helpers import random_instance, random_scenario


def test_single_scenario_degenerates_to_deterministic():
    rng = np.random.default_rng(2)
    for _ in range(20):
        inst = random_instance(rng, max_tasks=5)
        scenario = random_scenario(rng, inst)
        solution = solve_saa(inst, [scenario], rho=0.0)
        optimal = solve_min_makespan(inst, scenario)
        assert solution.objective == optimal.makespan


def test_toy_prefers_short_task_first():
    solution = solve_saa(toy_instance(), toy_scenarios(), rho=1.0)
    assert solution.first_stage.starts == (0, 10)
    assert solution.objective == 15.0


def test_toy_beats_deterministic_objective():
    inst = toy_instance()
    det = solve_min_makespan(inst, Scenario((4, 5)))
    det_objective, _ = saa_objective(inst, det.starts, toy_scenarios(), rho=1.0)
    solution = solve_saa(inst, toy_scenarios(), rho=1.0)
    assert solution.objective < det_objective


def test_two_task_search_matches_exhaustive_start_enumeration():
    inst = toy_instance()
    scenarios = toy_scenarios()
    best = min(
        saa_objective(inst, (z0, z1), scenarios, rho=1.0)[0]
        for z0 in range(30)
        for z1 in range(30)
    )
    solution = solve_saa(inst, scenarios, rho=1.0)
    assert solution.objective == best


def test_objective_is_recomputable_exactly():
    rng = np.random.default_rng(4)
    for _ in range(10):
        inst = random_instance(rng, max_tasks=5)
        scenarios = [random_scenario(rng, inst) for _ in range(4)]
        solution = solve_saa(inst, scenarios, rho=0.5)
        recomputed, mean_ms = saa_objective(
            inst, solution.first_stage.starts, scenarios, rho=0.5
        )
        assert recomputed == solution.objective
        assert mean_ms == solution.mean_recourse_makespan


def test_average_penalty_flag_divides_by_scenario_count():
    inst = toy_instance()
    starts = (10, 0)
    summed, _ = saa_objective(inst, starts, toy_scenarios(), rho=1.0)
    averaged, _ = saa_objective(
        inst, starts, toy_scenarios(), rho=1.0, average_penalty=True
    )
    # deviations over the five realizations: 0, 0, 0, 16, 17
    assert summed == 16.6 + 33.0
    assert averaged == 16.6 + 33.0 / 5


def test_deterministic_baseline_on_constant_scenarios():
    rng = np.random.default_rng(6)
    inst = random_instance(rng, max_tasks=5)
    d = Scenario(tuple(t.duration for t in inst.tasks))
    ds = Dataset(train=(d, d, d), validation=(), test=(), seed=0)
    schedule = deterministic_baseline(inst, ds)
    assert schedule == solve_min_makespan(inst, d)


def test_deterministic_baseline_toy():
    ds = Dataset(train=tuple(toy_scenarios()), validation=(), test=(), seed=0)
    schedule = deterministic_baseline(toy_instance(), ds)
    assert schedule.starts == (10, 0)
    assert schedule.makespan == 14


def test_deterministic_baseline_rounds_means():
    # means (4.0, 5.4) round to durations (4, 5)
    train = (Scenario((4, 5)), Scenario((4, 5)), Scenario((4, 5)), Scenario((4, 7)), Scenario((4, 5)))
    ds = Dataset(train=train, validation=(), test=(), seed=0)
    schedule = deterministic_baseline(toy_instance(), ds)
    assert schedule.assumed_durations == Scenario((4, 5))


def test_solution_starts_lower_bound_execution():
    rng = np.random.default_rng(8)
    inst = random_instance(rng, max_tasks=5)
    scenarios = [random_scenario(rng, inst) for _ in range(3)]
    solution = solve_saa(inst, scenarios, rho=1.0)
    for scenario in scenarios:
        corrected, _ = simulate_repair(inst, solution.first_stage.starts, scenario)
        assert all(
            c >= z for c, z in zip(corrected, solution.first_stage.starts)
        )


def test_search_trace_best_is_nonincreasing():
    rng = np.random.default_rng(10)
    inst = random_instance(rng, max_tasks=6)
    scenarios = [random_scenario(rng, inst) for _ in range(4)]
    solution = solve_saa(inst, scenarios, rho=1.0)
    best_values = [row[2] for row in solution.trace]
    assert best_values == sorted(best_values, reverse=True)
    assert best_values[-1] == solution.objective


def test_search_trace_csv(tmp_path):
    solution = solve_saa(toy_instance(), toy_scenarios(), rho=1.0)
    path = tmp_path / "trace.csv"
    from resched.saa import saa_trace_to_csv

    saa_trace_to_csv(solution, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "candidate,objective,best_objective"
    assert len(lines) == len(solution.trace) + 1


def test_saa_rejects_empty_scenarios():
    with pytest.raises(ValueError):
        solve_saa(toy_instance(), [], rho=1.0)


def test_saa_json():
    solution = solve_saa(toy_instance(), toy_scenarios(), rho=1.0)
    payload = json.loads(saa_to_json(solution))
    assert payload["starts"] == [0, 10]
    assert payload["objective"] == 15.0
    assert payload["n_scenarios"] == 5
