"""Experiment harness: run methods over instances, score them, write reports.

For each instance the harness generates a scenario dataset, fits the selected
methods on the train split, scores every method on the test split via
post-hoc regret against shared perfect-information schedules, and writes:

    records.csv   one row per (instance, method, test scenario)
    summary.csv   one row per (instance, method) with quartile statistics
    ttests.csv    paired t-test per method pair on normalized regret
    manifest.json the fully resolved configuration (no timestamps)

All outputs are pure functions of (config, seed): rerunning a configuration
produces byte-identical files.
"""

from __future__ import annotations

import csv
import glob
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dfl import TrainConfig, predict, train
from .instance import Instance
from .parsing import load_instance
from .regret import RegretRecord, compare_methods, evaluate_method
from .saa import deterministic_baseline, solve_saa
from .scenarios import Dataset, make_dataset
from .scheduler import Schedule, SolveBudget, solve_min_makespan

METHODS = ("deterministic", "saa", "dfl")

RECORD_HEADER = (
    "instance",
    "method",
    "scenario",
    "f_corr",
    "f_star",
    "penalty",
    "pregret",
    "normalized_pregret",
    "pred_optimality",
    "star_optimality",
)


@dataclass
class ExperimentConfig:
    instances: list[str]
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    penalty: str | float = "small"
    seed: int = 0
    sizes: tuple[int, int, int] = (100, 50, 50)
    out_dir: str = "results"
    workers: int = 1
    budget: SolveBudget = field(default_factory=SolveBudget)
    saa_scenarios: int = 20
    saa_average_penalty: bool = False
    dfl: dict = field(default_factory=dict)
    sampler: str = "normal"

    def __post_init__(self):
        if not self.instances:
            raise ValueError("config needs at least one instance path")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {METHODS}")
        if not self.methods:
            raise ValueError("config needs at least one method")
        if self.sampler not in ("normal", "toy-uniform"):
            raise ValueError(f"unknown sampler {self.sampler!r}")

    @classmethod
    def from_json(cls, text: str, overrides: dict | None = None) -> "ExperimentConfig":
        doc = json.loads(text)
        doc.update({k: v for k, v in (overrides or {}).items() if v is not None})
        budget_doc = doc.get("budget", {})
        budget = SolveBudget(
            node_limit=budget_doc.get("node_limit", 1_000_000),
            time_limit=budget_doc.get("time_limit"),
            exact_threshold=budget_doc.get("exact_threshold", 10),
        )
        if doc.get("time_limit") is not None:
            budget = SolveBudget(budget.node_limit, doc["time_limit"], budget.exact_threshold)
        return cls(
            instances=doc["instances"],
            methods=list(doc.get("methods", METHODS)),
            penalty=doc.get("penalty", "small"),
            seed=int(doc.get("seed", 0)),
            sizes=tuple(doc.get("sizes", (100, 50, 50))),
            out_dir=doc.get("out", "results"),
            workers=int(doc.get("workers", 1)),
            budget=budget,
            saa_scenarios=int(doc.get("saa", {}).get("n_scenarios", 20)),
            saa_average_penalty=bool(doc.get("saa", {}).get("average_penalty", False)),
            dfl=dict(doc.get("dfl", {})),
            sampler=doc.get("sampler", "normal"),
        )


def resolve_penalty(setting: str | float, n_tasks: int) -> float:
    """Map a penalty setting to a coefficient: small=1/tasks, large=1."""
    if isinstance(setting, (int, float)):
        value = float(setting)
    elif setting == "small":
        value = 1.0 / max(1, n_tasks)
    elif setting == "large":
        value = 1.0
    else:
        value = float(setting)
    if value < 0:
        raise ValueError(f"penalty must be nonnegative, got {value}")
    return value


def expand_instances(patterns: list[str]) -> list[str]:
    paths: list[str] = []
    for pattern in patterns:
        if any(ch in pattern for ch in "*?["):
            paths.extend(sorted(glob.glob(pattern)))
        else:
            paths.append(pattern)
    missing = [p for p in paths if not os.path.exists(p)]
    if missing:
        raise FileNotFoundError(f"instance files not found: {missing}")
    if not paths:
        raise FileNotFoundError(f"no instances matched {patterns}")
    return paths


def run_experiment(config: ExperimentConfig) -> Path:
    """Run all (instance, method) combinations; returns the output directory."""
    paths = expand_instances(config.instances)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    jobs = [(path, config) for path in paths]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            per_instance = list(pool.map(_run_one_instance, jobs))
    else:
        per_instance = [_run_one_instance(job) for job in jobs]

    rows: list[tuple] = []
    for result in per_instance:
        rows.extend(result["rows"])

    _write_records(out / "records.csv", rows)
    _write_summary(out / "summary.csv", rows)
    _write_ttests(out / "ttests.csv", rows, config.methods)
    manifest = {
        "version": __version__,
        "seed": config.seed,
        "sizes": list(config.sizes),
        "penalty": config.penalty,
        "methods": list(config.methods),
        "instances": [str(p) for p in paths],
        "budget": {
            "node_limit": config.budget.node_limit,
            "time_limit": config.budget.time_limit,
            "exact_threshold": config.budget.exact_threshold,
        },
        "saa": {
            "n_scenarios": config.saa_scenarios,
            "average_penalty": config.saa_average_penalty,
        },
        "dfl": config.dfl,
        "sampler": config.sampler,
        "resolved_penalties": {r["name"]: r["rho"] for r in per_instance},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return out


def report(results_dir) -> str:
    """Aggregate tables from a results directory; also writes report.csv."""
    results = Path(results_dir)
    missing = [
        name
        for name in ("records.csv", "summary.csv", "ttests.csv")
        if not (results / name).exists()
    ]
    if missing:
        raise FileNotFoundError(f"missing result files in {results}: {missing}")

    by_method: dict[str, list[float]] = {}
    with open(results / "records.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            by_method.setdefault(row["method"], []).append(
                float(row["normalized_pregret"])
            )

    lines = ["method  n  q25  median  q75  mean"]
    table_rows = []
    for method in sorted(by_method):
        values = by_method[method]
        q25, q50, q75 = (float(v) for v in np.percentile(values, [25, 50, 75]))
        mean = sum(values) / len(values)
        lines.append(
            f"{method}  {len(values)}  {q25:.6f}  {q50:.6f}  {q75:.6f}  {mean:.6f}"
        )
        table_rows.append((method, len(values), q25, q50, q75, mean))

    with open(results / "ttests.csv", newline="") as fh:
        ttest_rows = list(csv.DictReader(fh))
    if ttest_rows:
        lines.append("")
        lines.append("pairwise paired t-tests (normalized regret)")
        for row in ttest_rows:
            p = row["p"] if row["p"] else "degenerate"
            lines.append(f"{row['method_a']} vs {row['method_b']}: p={p}")

    with open(results / "report.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "n", "q25", "median", "q75", "mean"])
        for row in table_rows:
            writer.writerow(row)
    return "\n".join(lines)


# --- per-instance pipeline ---------------------------------------------------


def pick_sampler(name: str, instance: Instance):
    """Map a sampler name to a scenario generator for the given instance."""
    if name == "normal":
        return None  # make_dataset default
    from .toy import STOCHASTIC_HALFWIDTHS, toy_sampler

    if instance.n_tasks != len(STOCHASTIC_HALFWIDTHS):
        raise ValueError(
            "sampler 'toy-uniform' only applies to the two-task demo instance"
        )
    return toy_sampler()


def _run_one_instance(job: tuple[str, ExperimentConfig]) -> dict:
    path, config = job
    instance = load_instance(path).instance
    name = Path(path).stem
    rho = resolve_penalty(config.penalty, instance.n_tasks)
    dataset = make_dataset(
        instance, config.seed, config.sizes, sampler=pick_sampler(config.sampler, instance)
    )

    perfect = [
        solve_min_makespan(instance, scenario, config.budget, seed=config.seed)
        for scenario in dataset.test
    ]

    rows: list[tuple] = []
    for method in config.methods:
        records = _evaluate(method, instance, dataset, rho, config, perfect)
        for record in records:
            rows.append(
                (
                    name,
                    method,
                    record.scenario_id,
                    record.f_corr,
                    record.f_star,
                    record.penalty,
                    record.pregret,
                    record.normalized_pregret,
                    record.pred_optimality.value,
                    record.star_optimality.value,
                )
            )
    return {"name": name, "rho": rho, "rows": rows}


def _evaluate(
    method: str,
    instance: Instance,
    dataset: Dataset,
    rho: float,
    config: ExperimentConfig,
    perfect: list[Schedule],
) -> list[RegretRecord]:
    if method == "deterministic":
        decision: Schedule = deterministic_baseline(
            instance, dataset, config.budget, seed=config.seed
        )
    elif method == "saa":
        solution = solve_saa(
            instance,
            list(dataset.train[: config.saa_scenarios]),
            rho,
            config.budget,
            seed=config.seed,
            average_penalty=config.saa_average_penalty,
        )
        decision = solution.first_stage
    elif method == "dfl":
        train_config = TrainConfig(
            learning_rate=config.dfl.get("learning_rate", 0.01),
            epochs=config.dfl.get("epochs", 20),
            batch_size=config.dfl.get("batch_size", 1),
            samples_per_step=config.dfl.get("samples_per_step", 1),
            seed=config.seed,
            rho=rho,
            budget=config.budget,
            use_baseline=config.dfl.get("use_baseline", False),
        )
        params, _ = train(instance, dataset, train_config)
        decision = predict(params)
    else:
        raise ValueError(f"unknown method {method}")

    records, _ = evaluate_method(
        instance,
        decision,
        list(dataset.test),
        rho,
        config.budget,
        seed=config.seed,
        perfect_schedules=perfect,
    )
    return records


# --- writers ------------------------------------------------------------------


def _write_records(path: Path, rows: list[tuple]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RECORD_HEADER)
        writer.writerows(rows)


def _write_summary(path: Path, rows: list[tuple]) -> None:
    groups: dict[tuple[str, str], list[float]] = {}
    order: list[tuple[str, str]] = []
    for row in rows:
        key = (row[0], row[1])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(float(row[7]))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["instance", "method", "n", "mean_normalized_pregret", "q25", "median", "q75"]
        )
        for key in order:
            values = groups[key]
            q25, q50, q75 = (float(v) for v in np.percentile(values, [25, 50, 75]))
            writer.writerow(
                [key[0], key[1], len(values), sum(values) / len(values), q25, q50, q75]
            )


def _write_ttests(path: Path, rows: list[tuple], methods: list[str]) -> None:
    series: dict[str, list[float]] = {m: [] for m in methods}
    for row in rows:
        series[row[1]].append(float(row[7]))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["method_a", "method_b", "n", "mean_a", "mean_b", "t", "p", "significant", "note"]
        )
        for i, a in enumerate(methods):
            for b in methods[i + 1 :]:
                if not series[a] or not series[b]:
                    continue
                cmp = compare_methods(a, series[a], b, series[b])
                if cmp.degenerate:
                    writer.writerow([a, b, len(series[a]), cmp.mean_a, cmp.mean_b, "", "", "", "degenerate"])
                else:
                    writer.writerow(
                        [
                            a,
                            b,
                            len(series[a]),
                            cmp.mean_a,
                            cmp.mean_b,
                            cmp.t_statistic,
                            cmp.p_value,
                            cmp.p_value < cmp.alpha,
                            "",
                        ]
                    )
