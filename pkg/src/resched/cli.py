"""Command-line harness.

Subcommands:
    gen        generate a scenario dataset for an instance
    solve-det  schedule against rounded mean durations
    solve-saa  scenario-programming first-stage starts
    train-dfl  train the gradient-based duration estimator
    eval       score a schedule / params / prediction on the test split
    report     aggregate tables from a results directory
    run        full pipeline over instances from a config file

``run`` reads a JSON config; every field can be overridden by a flag.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .dfl import TrainConfig, curve_to_csv, params_from_json, params_to_json, predict, train
from .experiment import ExperimentConfig, report, resolve_penalty, run_experiment
from .parsing import ParseError, load_instance
from .regret import RegretRecord, evaluate_method
from .saa import deterministic_baseline, saa_to_json, saa_trace_to_csv, solve_saa
from .scenarios import dataset_from_json, dataset_to_csv, dataset_to_json, make_dataset
from .scheduler import SolveBudget, schedule_from_json, schedule_to_json


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="resched")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a scenario dataset")
    _common_instance_args(gen)
    gen.add_argument("--sizes", default="100,50,50", help="train,validation,test sizes")
    gen.add_argument("--out", required=True, help="output path (.json or .csv)")
    gen.set_defaults(handler=_cmd_gen)

    det = sub.add_parser("solve-det", help="schedule against rounded mean durations")
    _common_instance_args(det)
    _dataset_arg(det)
    _budget_args(det)
    det.add_argument("--out", required=True, help="schedule JSON output path")
    det.set_defaults(handler=_cmd_solve_det)

    saa = sub.add_parser("solve-saa", help="scenario-programming first-stage starts")
    _common_instance_args(saa)
    _dataset_arg(saa)
    _budget_args(saa)
    saa.add_argument("--penalty", default="large")
    saa.add_argument("--n-scenarios", type=int, default=20)
    saa.add_argument("--out", required=True, help="solution JSON output path")
    saa.add_argument("--trace", help="optional search-trace CSV path")
    saa.set_defaults(handler=_cmd_solve_saa)

    dfl = sub.add_parser("train-dfl", help="train the gradient-based estimator")
    _common_instance_args(dfl)
    _dataset_arg(dfl)
    _budget_args(dfl)
    dfl.add_argument("--penalty", default="large")
    dfl.add_argument("--learning-rate", type=float, default=0.01)
    dfl.add_argument("--epochs", type=int, default=20)
    dfl.add_argument("--batch-size", type=int, default=1)
    dfl.add_argument("--out", required=True, help="params JSON output path")
    dfl.add_argument("--curve", help="optional training-curve CSV path")
    dfl.set_defaults(handler=_cmd_train_dfl)

    ev = sub.add_parser("eval", help="score a decision on the test split")
    _common_instance_args(ev)
    _dataset_arg(ev)
    _budget_args(ev)
    ev.add_argument("--penalty", default="large")
    ev.add_argument("--schedule", help="schedule JSON from solve-det/solve-saa")
    ev.add_argument("--params", help="params JSON from train-dfl")
    ev.add_argument("--out", required=True, help="records CSV output path")
    ev.set_defaults(handler=_cmd_eval)

    rep = sub.add_parser("report", help="aggregate tables from a results directory")
    rep.add_argument("--results", required=True)
    rep.set_defaults(handler=_cmd_report)

    run = sub.add_parser("run", help="full pipeline from a config file")
    run.add_argument("--config", help="JSON config path")
    run.add_argument("--instances", nargs="*", help="instance paths or globs")
    run.add_argument("--methods", help="comma-separated subset of deterministic,saa,dfl")
    run.add_argument("--penalty", help="small, large, or a number")
    run.add_argument("--seed", type=int)
    run.add_argument("--sizes", help="train,validation,test sizes")
    run.add_argument("--out")
    run.add_argument("--workers", type=int)
    run.add_argument("--time-limit", type=float)
    run.add_argument("--sampler", choices=("normal", "toy-uniform"))
    run.set_defaults(handler=_cmd_run)

    return parser


def _common_instance_args(p):
    p.add_argument("--instance", required=True, help="instance file (.sm or .json)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampler", choices=("normal", "toy-uniform"), default="normal")


def _dataset_arg(p):
    p.add_argument(
        "--dataset",
        help="dataset JSON from gen; generated on the fly from --seed when omitted",
    )
    p.add_argument("--sizes", default="100,50,50")


def _budget_args(p):
    p.add_argument("--node-limit", type=int, default=1_000_000)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--exact-threshold", type=int, default=10)


def _load(args):
    from .experiment import pick_sampler

    instance = load_instance(args.instance).instance
    if getattr(args, "dataset", None):
        dataset = dataset_from_json(Path(args.dataset).read_text())
    else:
        sizes = tuple(int(v) for v in args.sizes.split(","))
        sampler = pick_sampler(args.sampler, instance)
        dataset = make_dataset(instance, args.seed, sizes, sampler=sampler)
    return instance, dataset


def _budget(args) -> SolveBudget:
    return SolveBudget(
        node_limit=args.node_limit,
        time_limit=args.time_limit,
        exact_threshold=args.exact_threshold,
    )


def _cmd_gen(args) -> int:
    from .experiment import pick_sampler

    instance = load_instance(args.instance).instance
    sizes = tuple(int(v) for v in args.sizes.split(","))
    dataset = make_dataset(
        instance, args.seed, sizes, sampler=pick_sampler(args.sampler, instance)
    )
    if args.out.endswith(".csv"):
        dataset_to_csv(dataset, args.out)
    else:
        Path(args.out).write_text(dataset_to_json(dataset))
    print(f"wrote {args.out}")
    return 0


def _cmd_solve_det(args) -> int:
    instance, dataset = _load(args)
    schedule = deterministic_baseline(instance, dataset, _budget(args), seed=args.seed)
    Path(args.out).write_text(schedule_to_json(schedule))
    print(f"makespan {schedule.makespan} ({schedule.optimality.value}); wrote {args.out}")
    return 0


def _cmd_solve_saa(args) -> int:
    instance, dataset = _load(args)
    rho = resolve_penalty(args.penalty, instance.n_tasks)
    solution = solve_saa(
        instance,
        list(dataset.train[: args.n_scenarios]),
        rho,
        _budget(args),
        seed=args.seed,
    )
    Path(args.out).write_text(saa_to_json(solution))
    if args.trace:
        saa_trace_to_csv(solution, args.trace)
    print(f"objective {solution.objective}; wrote {args.out}")
    return 0


def _cmd_train_dfl(args) -> int:
    instance, dataset = _load(args)
    rho = resolve_penalty(args.penalty, instance.n_tasks)
    config = TrainConfig(
        learning_rate=args.learning_rate,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        rho=rho,
        budget=_budget(args),
    )
    params, curve = train(instance, dataset, config)
    Path(args.out).write_text(params_to_json(params))
    if args.curve:
        curve_to_csv(curve, args.curve)
    print(f"final epoch mean regret {curve[-1]:.4f}; wrote {args.out}")
    return 0


def _cmd_eval(args) -> int:
    instance, dataset = _load(args)
    rho = resolve_penalty(args.penalty, instance.n_tasks)
    if bool(args.schedule) == bool(args.params):
        raise ValueError("pass exactly one of --schedule or --params")
    if args.schedule:
        decision = schedule_from_json(Path(args.schedule).read_text())
    else:
        decision = predict(params_from_json(Path(args.params).read_text()))
    records, mean_norm = evaluate_method(
        instance, decision, list(dataset.test), rho, _budget(args), seed=args.seed
    )
    _records_csv(records, args.out)
    print(f"mean normalized regret {mean_norm:.6f} over {len(records)} scenarios")
    return 0


def _cmd_report(args) -> int:
    print(report(args.results))
    return 0


def _cmd_run(args) -> int:
    overrides = {
        "instances": args.instances or None,
        "penalty": args.penalty,
        "seed": args.seed,
        "out": args.out,
        "workers": args.workers,
        "time_limit": args.time_limit,
        "sampler": args.sampler,
    }
    if args.methods:
        overrides["methods"] = args.methods.split(",")
    if args.sizes:
        overrides["sizes"] = [int(v) for v in args.sizes.split(",")]
    text = Path(args.config).read_text() if args.config else "{}"
    config = ExperimentConfig.from_json(text, overrides)
    out = run_experiment(config)
    print(report(out))
    return 0


def _records_csv(records: list[RegretRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RegretRecord.CSV_FIELDS)
        for r in records:
            writer.writerow(
                [
                    r.scenario_id,
                    r.f_corr,
                    r.f_star,
                    r.penalty,
                    r.pregret,
                    r.normalized_pregret,
                    r.pred_optimality.value,
                    r.star_optimality.value,
                ]
            )


if __name__ == "__main__":
    sys.exit(main())
