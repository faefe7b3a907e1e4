"""Experiment reports: evaluation metrics, serialization, and aggregation."""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from .dataset import imbalance_ratio

__all__ = [
    "RunMeta",
    "IterationRecord",
    "Report",
    "average_accuracy",
    "samples_to_accuracy",
    "imbalance_profile",
    "write_report",
    "read_report",
    "aggregate",
    "write_aggregate",
]


@dataclasses.dataclass(frozen=True)
class RunMeta:
    af: str
    seed: int
    total_budget: int
    iterations: int
    dataset: str
    cost_sensitive: bool


@dataclasses.dataclass(frozen=True)
class IterationRecord:
    iteration: int
    labeled_count: int
    accuracy: float
    class_counts: tuple
    ir: float
    selected_ids: tuple


@dataclasses.dataclass(frozen=True)
class Report:
    meta: RunMeta
    records: tuple


def _sorted_records(report: Report):
    return sorted(report.records, key=lambda r: r.iteration)


def average_accuracy(report: Report) -> float:
    """Unweighted mean of per-iteration test accuracies."""
    records = _sorted_records(report)
    if not records:
        raise ValueError("empty report")
    return float(np.mean([r.accuracy for r in records]))


def samples_to_accuracy(report: Report, threshold: float):
    """Smallest cumulative labeled count reaching the accuracy threshold.

    Returns None when the threshold is never reached.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    for record in _sorted_records(report):
        if record.accuracy >= threshold:
            return record.labeled_count
    return None


def imbalance_profile(report: Report):
    """Per-iteration imbalance ratio of the labeled pool."""
    return [imbalance_ratio(np.array(r.class_counts)) for r in _sorted_records(report)]


def _report_payload(report: Report) -> dict:
    return {
        "meta": {
            "af": report.meta.af,
            "seed": report.meta.seed,
            "plan": {"b": report.meta.total_budget, "t": report.meta.iterations},
            "dataset": report.meta.dataset,
            "cost_sensitive": report.meta.cost_sensitive,
        },
        "records": [
            {
                "k": r.iteration,
                "labeled": r.labeled_count,
                "acc": r.accuracy,
                "ir": r.ir,
                "class_counts": list(r.class_counts),
                "selected": list(r.selected_ids),
            }
            for r in _sorted_records(report)
        ],
    }


def write_report(report: Report, path, format: str = "json") -> None:
    """Serialize a report; json is lossless, csv carries the accuracy curve."""
    if format == "json":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(_report_payload(report), fh, indent=2)
            fh.write("\n")
    elif format == "csv":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("iteration,labeled_count,accuracy,ir\n")
            for r in _sorted_records(report):
                fh.write(f"{r.iteration},{r.labeled_count},{r.accuracy:.6f},{r.ir:.6f}\n")
    else:
        raise ValueError(f"unknown format {format!r}")


def read_report(path) -> Report:
    """Inverse of write_report(format='json')."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    meta = RunMeta(
        af=payload["meta"]["af"],
        seed=payload["meta"]["seed"],
        total_budget=payload["meta"]["plan"]["b"],
        iterations=payload["meta"]["plan"]["t"],
        dataset=payload["meta"]["dataset"],
        cost_sensitive=payload["meta"]["cost_sensitive"],
    )
    records = tuple(
        IterationRecord(
            iteration=r["k"],
            labeled_count=r["labeled"],
            accuracy=r["acc"],
            class_counts=tuple(r["class_counts"]),
            ir=r["ir"],
            selected_ids=tuple(r["selected"]),
        )
        for r in payload["records"]
    )
    return Report(meta=meta, records=records)


def aggregate(reports) -> dict:
    """Mean and population std of accuracy and labeled-pool ir per iteration.

    All reports must share the same budget plan.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to aggregate")
    iterations = [r.iteration for r in _sorted_records(reports[0])]
    rows = []
    for k in iterations:
        accs = []
        irs = []
        labeled = None
        for report in reports:
            match = [r for r in report.records if r.iteration == k]
            if len(match) != 1:
                raise ValueError(f"report missing iteration {k}")
            accs.append(match[0].accuracy)
            irs.append(match[0].ir)
            labeled = match[0].labeled_count
        rows.append({
            "k": k,
            "labeled": labeled,
            "acc_mean": float(np.mean(accs)),
            "acc_std": float(np.std(accs)),
            "ir_mean": float(np.mean(irs)),
            "ir_std": float(np.std(irs)),
        })
    return {
        "af": reports[0].meta.af,
        "seeds": [r.meta.seed for r in reports],
        "rows": rows,
    }


def write_aggregate(agg: dict, path, format: str = "json") -> None:
    if format == "json":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(agg, fh, indent=2)
            fh.write("\n")
    elif format == "csv":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("iteration,labeled_count,acc_mean,acc_std,ir_mean,ir_std\n")
            for row in agg["rows"]:
                fh.write(f"{row['k']},{row['labeled']},{row['acc_mean']:.6f},"
                         f"{row['acc_std']:.6f},{row['ir_mean']:.6f},{row['ir_std']:.6f}\n")
    else:
        raise ValueError(f"unknown format {format!r}")
