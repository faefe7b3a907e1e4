"""Command-line front end: run experiments, generate and rebalance datasets.

Subcommands:
    run        execute one acquisition strategy over one or more seeds
    compare    run several strategies with shared seeds, print a gain table
    synth      write a synthetic Gaussian-blob embedding CSV
    imbalance  subsample a CSV to a target imbalance ratio

Exit codes: 0 success, 2 usage/config error, 1 runtime failure. Every flag
has a JSON config-file equivalent (--config); explicit flags override file
values.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import dataset as ds
from . import engine, metrics

USAGE_ERROR = 2
RUNTIME_ERROR = 1

DEFAULT_BUDGET = 3200
DEFAULT_ITERS = 16
DEFAULT_SEEDS = "0..4"


class CliError(Exception):
    """Config or usage problem: reported with exit code 2."""


def parse_seeds(spec: str):
    """Parse seed lists: '0..4' (inclusive range) or '0,1,2'."""
    spec = spec.strip()
    try:
        if ".." in spec:
            lo, hi = spec.split("..")
            seeds = list(range(int(lo), int(hi) + 1))
        else:
            seeds = [int(s) for s in spec.split(",") if s.strip()]
    except ValueError:
        raise CliError(f"cannot parse seeds {spec!r}") from None
    if not seeds:
        raise CliError("no seeds given")
    return seeds


def _merged(args: argparse.Namespace, key: str, default=None):
    """Flag value if given, else config-file value, else default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    config = getattr(args, "_config", {})
    if key in config:
        return config[key]
    return default


def _load_config(args: argparse.Namespace) -> None:
    config = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                config = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(config, dict):
            raise CliError("config file must hold a JSON object")
    args._config = config


def _load_pair(args):
    """Train/test datasets from CSVs or from synth parameters."""
    train_path = _merged(args, "train")
    test_path = _merged(args, "test")
    synth = _merged(args, "synth")
    if train_path and test_path:
        name = os.path.splitext(os.path.basename(train_path))[0]
        return ds.load_dataset(train_path), ds.load_dataset(test_path), name
    if synth:
        params = _parse_synth(synth)
        n_classes, per_class, dim, std, seed = params
        full = ds.make_synthetic(n_classes, per_class, dim, std, seed)
        train, test = ds.train_test_split(full, 0.2, seed + 1)
        return train, test, f"synth{n_classes}x{per_class}d{dim}"
    raise CliError("provide --train and --test CSVs, or --synth parameters")


def _parse_synth(spec):
    if isinstance(spec, (list, tuple)):
        parts = list(spec)
    else:
        parts = str(spec).split(",")
    if len(parts) != 5:
        raise CliError("--synth expects n_classes,per_class,dim,cluster_std,seed")
    try:
        return int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3]), int(parts[4])
    except ValueError:
        raise CliError(f"bad --synth value {spec!r}") from None


def _plan(args) -> engine.BudgetPlan:
    budget = int(_merged(args, "budget", DEFAULT_BUDGET))
    iters = int(_merged(args, "iters", DEFAULT_ITERS))
    try:
        return engine.BudgetPlan(total_budget=budget, iterations=iters)
    except engine.EngineError as exc:
        raise CliError(str(exc)) from None


def _run_af(af, train, test, name, plan, seeds, cost_sensitive, out_dir, fmt):
    """Run one strategy for each seed; write per-seed reports + aggregate."""
    os.makedirs(out_dir, exist_ok=True)
    reports = []
    for seed in seeds:
        report = engine.run_experiment(train, test, af, plan, seed,
                                       cost_sensitive=cost_sensitive,
                                       dataset_name=name)
        path = os.path.join(out_dir, f"{name}_{af}_seed{seed}.{fmt}")
        metrics.write_report(report, path, format=fmt)
        reports.append(report)
    agg = metrics.aggregate(reports)
    metrics.write_aggregate(agg, os.path.join(out_dir, f"{name}_{af}_aggregate.{fmt}"),
                            format=fmt)
    return reports


def cmd_run(args) -> int:
    _load_config(args)
    af = _merged(args, "af")
    if af is None:
        raise CliError("missing --af")
    if af not in engine.AF_NAMES:
        raise CliError(f"unknown acquisition function {af!r}; "
                       f"choose from {', '.join(engine.AF_NAMES)}")
    train, test, name = _load_pair(args)
    plan = _plan(args)
    seeds = parse_seeds(str(_merged(args, "seeds", DEFAULT_SEEDS)))
    cost_sensitive = bool(_merged(args, "cost_sensitive", True))
    out_dir = _merged(args, "out", ".")
    fmt = _merged(args, "format", "json")
    _run_af(af, train, test, name, plan, seeds, cost_sensitive, out_dir, fmt)
    print(f"wrote {len(seeds)} report(s) + aggregate for {af} to {out_dir}")
    return 0


def cmd_compare(args) -> int:
    _load_config(args)
    afs = _merged(args, "afs")
    if afs is None:
        afs = list(engine.AF_NAMES)
    elif isinstance(afs, str):
        afs = [a.strip() for a in afs.split(",") if a.strip()]
    for af in afs:
        if af not in engine.AF_NAMES:
            raise CliError(f"unknown acquisition function {af!r}")
    if "random" not in afs:
        afs = ["random"] + afs

    train, test, name = _load_pair(args)
    plan = _plan(args)
    seeds = parse_seeds(str(_merged(args, "seeds", DEFAULT_SEEDS)))
    cost_sensitive = bool(_merged(args, "cost_sensitive", True))
    out_dir = _merged(args, "out", ".")
    fmt = _merged(args, "format", "json")

    mean_avg = {}
    for af in afs:
        reports = _run_af(af, train, test, name, plan, seeds, cost_sensitive,
                          out_dir, fmt)
        avgs = [metrics.average_accuracy(r) for r in reports]
        mean_avg[af] = sum(avgs) / len(avgs)

    baseline = mean_avg["random"]
    print(f"{'af':<12}{'avg_acc':>10}{'gain_vs_random_pts':>22}")
    for af in afs:
        gain = 100.0 * (mean_avg[af] - baseline)
        print(f"{af:<12}{mean_avg[af]:>10.4f}{gain:>22.2f}")
    return 0


def cmd_synth(args) -> int:
    _load_config(args)
    try:
        data = ds.make_synthetic(args.classes, args.per_class, args.dim,
                                 args.cluster_std, args.seed)
    except ds.DatasetError as exc:
        raise CliError(str(exc)) from None
    ds.write_dataset(data, args.output)
    print(f"wrote {data.n_samples} samples ({data.n_classes} classes, dim {data.dim}) "
          f"to {args.output}")
    return 0


def cmd_imbalance(args) -> int:
    _load_config(args)
    data = ds.load_dataset(args.input)
    try:
        skewed = ds.induce_imbalance(data, args.target_ir, args.min_per_class,
                                     args.seed)
    except ds.DatasetError as exc:
        raise CliError(str(exc)) from None
    ds.write_dataset(skewed, args.output)
    achieved = ds.imbalance_ratio(skewed.class_counts())
    print(f"wrote {skewed.n_samples} samples to {args.output}; "
          f"achieved ir {achieved:.4f} (target {args.target_ir})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alamp",
        description="Pool-based active learning simulation over embedding CSVs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--train", help="training embedding CSV (pool + oracle labels)")
        p.add_argument("--test", help="held-out embedding CSV for accuracy")
        p.add_argument("--synth",
                       help="synthetic data instead of CSVs: "
                            "n_classes,per_class,dim,cluster_std,seed")
        p.add_argument("--budget", type=int, help=f"total budget b (default {DEFAULT_BUDGET})")
        p.add_argument("--iters", type=int, help=f"iterations t (default {DEFAULT_ITERS})")
        p.add_argument("--seeds", help=f"'0..4' or '0,1,2' (default {DEFAULT_SEEDS})")
        p.add_argument("--cost-sensitive", dest="cost_sensitive",
                       action="store_true", default=None)
        p.add_argument("--no-cost-sensitive", dest="cost_sensitive",
                       action="store_false")
        p.add_argument("--out", help="output directory (default .)")
        p.add_argument("--format", choices=("csv", "json"), help="report format")
        p.add_argument("--config", help="JSON config file; flags override its values")

    p_run = sub.add_parser("run", help="run one acquisition strategy")
    common(p_run)
    p_run.add_argument("--af", help=f"one of {', '.join(engine.AF_NAMES)}")
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run several strategies, print gain table")
    common(p_cmp)
    p_cmp.add_argument("--afs", help="comma-separated strategies (default: all)")
    p_cmp.set_defaults(func=cmd_compare)

    p_synth = sub.add_parser("synth", help="write a synthetic embedding CSV")
    p_synth.add_argument("--classes", type=int, required=True)
    p_synth.add_argument("--per-class", dest="per_class", type=int, required=True)
    p_synth.add_argument("--dim", type=int, required=True)
    p_synth.add_argument("--cluster-std", dest="cluster_std", type=float, required=True)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--output", required=True)
    p_synth.add_argument("--config", help="JSON config file")
    p_synth.set_defaults(func=cmd_synth)

    p_imb = sub.add_parser("imbalance", help="subsample a CSV to a target imbalance ratio")
    p_imb.add_argument("--input", required=True)
    p_imb.add_argument("--target-ir", dest="target_ir", type=float, required=True)
    p_imb.add_argument("--min-per-class", dest="min_per_class", type=int, default=1)
    p_imb.add_argument("--seed", type=int, default=0)
    p_imb.add_argument("--output", required=True)
    p_imb.add_argument("--config", help="JSON config file")
    p_imb.set_defaults(func=cmd_imbalance)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ds.DatasetError, engine.EngineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:  # runtime failures: I/O, numerical, etc.
        print(f"runtime error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
