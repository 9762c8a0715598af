"""Post-hoc regret records, aggregation over test scenarios, and t-tests.

The post-hoc regret of a prediction against one realization combines how much
worse the repaired schedule's makespan is than the perfect-information
optimum with a penalty on the start-time deviations the repair introduced:

    pregret = f_corr - f_star + rho * sum_j (corrected_j - planned_j)

Both the predicted-duration schedule and the perfect-information schedule are
computed with the same solver and budget, so heuristic gaps cancel out in
method comparisons.  When a solve is heuristic the regret can come out
negative; records keep the optimality flags so those cases stay visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import stats as _scipy_stats

from .instance import Instance, Scenario
from .scheduler import Optimality, Schedule, SolveBudget, solve_min_makespan
from .simulate import execute


@dataclass(frozen=True)
class RegretRecord:
    scenario_id: int
    f_corr: int
    f_star: int
    penalty: float
    pregret: float
    normalized_pregret: float
    pred_optimality: Optimality
    star_optimality: Optimality

    CSV_FIELDS = (
        "scenario_id",
        "f_corr",
        "f_star",
        "penalty",
        "pregret",
        "normalized_pregret",
        "pred_optimality",
        "star_optimality",
    )


@dataclass(frozen=True)
class MethodComparison:
    method_a: str
    method_b: str
    mean_a: float
    mean_b: float
    t_statistic: float | None
    p_value: float | None
    degenerate: bool = False
    alpha: float = 0.05


def post_hoc_regret(
    instance: Instance,
    predicted: Scenario,
    realized: Scenario,
    rho: float,
    budget: SolveBudget | None = None,
    scenario_id: int = 0,
    seed: int = 0,
    perfect: Schedule | None = None,
) -> RegretRecord:
    """Regret of scheduling with predicted durations against one realization.

    ``perfect`` may carry a precomputed perfect-information schedule for the
    realization (same solver, same budget), e.g. when many predictions are
    scored against the same test scenario.
    """
    first_stage = solve_min_makespan(instance, predicted, budget, seed=seed)
    return _record_for(
        instance, first_stage, realized, rho, budget, scenario_id, seed, perfect
    )


def evaluate_method(
    instance: Instance,
    decision: Scenario | Schedule,
    test_scenarios,
    rho: float,
    budget: SolveBudget | None = None,
    seed: int = 0,
    perfect_schedules: list[Schedule] | None = None,
) -> tuple[list[RegretRecord], float]:
    """Score a method on a test set; returns records and mean normalized regret.

    ``decision`` is either a predicted duration vector (solved once, then
    executed under every scenario) or a ready first-stage Schedule (executed
    directly, as for the scenario-programming baseline).
    """
    if not test_scenarios:
        raise ValueError("test scenario list is empty")
    if isinstance(decision, Schedule):
        first_stage = decision
    else:
        first_stage = solve_min_makespan(instance, decision, budget, seed=seed)
    records = []
    for i, scenario in enumerate(test_scenarios):
        perfect = perfect_schedules[i] if perfect_schedules else None
        records.append(
            _record_for(instance, first_stage, scenario, rho, budget, i, seed, perfect)
        )
    mean_norm = sum(r.normalized_pregret for r in records) / len(records)
    return records, mean_norm


def paired_t_test(a, b) -> tuple[float, float]:
    """Two-sided paired t-test on mean(a - b) = 0.

    Returns (t, p) with n-1 degrees of freedom.  Raises ValueError on
    degenerate input: unequal lengths, fewer than two pairs, or all
    differences zero (the statistic is undefined).
    """
    if len(a) != len(b):
        raise ValueError("paired samples must have equal length")
    n = len(a)
    if n < 2:
        raise ValueError("need at least two pairs")
    diffs = [x - y for x, y in zip(a, b)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    if var == 0.0:
        raise ValueError("degenerate: all paired differences are equal")
    t = mean / math.sqrt(var / n)
    p = 2.0 * float(_scipy_stats.t.sf(abs(t), n - 1))
    return t, p


def compare_methods(name_a, values_a, name_b, values_b) -> MethodComparison:
    mean_a = sum(values_a) / len(values_a)
    mean_b = sum(values_b) / len(values_b)
    try:
        t, p = paired_t_test(values_a, values_b)
        return MethodComparison(name_a, name_b, mean_a, mean_b, t, p)
    except ValueError:
        return MethodComparison(name_a, name_b, mean_a, mean_b, None, None, degenerate=True)


def _record_for(
    instance, first_stage, realized, rho, budget, scenario_id, seed, perfect
) -> RegretRecord:
    result = execute(instance, first_stage, realized, rho)
    if perfect is None:
        perfect = solve_min_makespan(instance, realized, budget, seed=seed)
    f_corr = result.realized_makespan
    f_star = perfect.makespan
    pregret = f_corr - f_star + result.penalty
    normalized = pregret / f_star if f_star > 0 else pregret
    return RegretRecord(
        scenario_id=scenario_id,
        f_corr=f_corr,
        f_star=f_star,
        penalty=result.penalty,
        pregret=pregret,
        normalized_pregret=normalized,
        pred_optimality=first_stage.optimality,
        star_optimality=perfect.optimality,
    )
