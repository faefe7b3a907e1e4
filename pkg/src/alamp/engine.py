"""Iterative pool-based active learning protocol.

A run starts from a random seed batch, then alternates selection (per the
chosen acquisition function), simulated labeling (labels come from the
training dataset itself), and from-scratch retraining with fresh
cross-validated regularization. Probability estimates of the previous model
are kept so the cross-iteration score and its diversified variant can compare
successive models.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import acquisition, classifier
from .classifier import Model, ProbMatrix
from .dataset import Dataset, imbalance_ratio
from .metrics import IterationRecord, Report, RunMeta

__all__ = [
    "AF_NAMES",
    "BudgetPlan",
    "PoolState",
    "EngineError",
    "init_pool",
    "step",
    "run_experiment",
]

AF_NAMES = ("random", "margin", "coreset", "alamp", "alamp-div", "rand-div", "marg-div")

# Fallback regularization when the labeled pool is too degenerate for CV.
FALLBACK_REG = 0.1


class EngineError(ValueError):
    """Raised for invalid protocol configurations or exhausted pools."""


@dataclasses.dataclass(frozen=True)
class BudgetPlan:
    """Total annotation budget split evenly over t iterations."""

    total_budget: int
    iterations: int

    def __post_init__(self):
        if self.iterations < 1:
            raise EngineError("iterations must be >= 1")
        if self.total_budget % self.iterations != 0:
            raise EngineError(
                f"budget {self.total_budget} not divisible by {self.iterations} iterations")
        if self.total_budget // self.iterations < 1:
            raise EngineError("batch size must be >= 1")

    @property
    def batch(self) -> int:
        return self.total_budget // self.iterations


@dataclasses.dataclass(frozen=True)
class PoolState:
    """Labeled/unlabeled partition plus the previous model's estimates."""

    labeled_ids: np.ndarray    # in labeling order
    unlabeled_ids: np.ndarray  # ascending
    iteration: int
    prev_probs: ProbMatrix | None = None
    prev_pseudo: dict | None = None


def _step_seed(seed: int, k: int) -> int:
    """Deterministic per-iteration child seed."""
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


def _fit(train: Dataset, labeled_ids: np.ndarray, cost_sensitive: bool,
         seed: int) -> Model:
    """Retrain from scratch on the labeled pool (fresh CV, fresh weights).

    Classes with fewer than 2 labeled samples cannot be stratified, so CV is
    run on the remaining classes; if fewer than 2 classes qualify, a fixed
    fallback regularization is used.
    """
    pool = train.subset(labeled_ids)
    counts = pool.class_counts()
    if cost_sensitive:
        weights = classifier.class_weights(counts)
    else:
        weights = np.ones(train.n_classes)

    cv_ok = counts[pool.labels] >= 2
    cv_labels = pool.labels[cv_ok]
    if len(np.unique(cv_labels)) >= 2:
        reg = classifier.select_reg_param(pool.features[cv_ok], cv_labels,
                                          classifier.DEFAULT_REG_GRID,
                                          folds=3, seed=seed)
    else:
        reg = FALLBACK_REG
    return classifier.train(pool.features, pool.labels, weights, reg, seed=seed)


def init_pool(train: Dataset, plan: BudgetPlan, seed: int,
              cost_sensitive: bool = True):
    """Random seed batch of size b/t plus the initial model trained on it.

    Redraws with an incremented seed (up to 10 attempts) when the draw covers
    fewer than 2 classes.
    """
    if plan.total_budget >= train.n_samples:
        raise EngineError("budget must be smaller than the unlabeled pool")
    labeled = None
    for attempt in range(10):
        candidate = acquisition.random_select(train.sample_ids, plan.batch,
                                              seed + attempt)
        if len(np.unique(train.subset(candidate).labels)) >= 2:
            labeled = candidate
            break
    if labeled is None:
        raise EngineError("initial batch covered fewer than 2 classes in 10 draws")
    unlabeled = np.setdiff1d(train.sample_ids, labeled)
    model = _fit(train, labeled, cost_sensitive, _step_seed(seed, 0))
    state = PoolState(labeled_ids=labeled, unlabeled_ids=unlabeled, iteration=0)
    return state, model


def _select(state: PoolState, model: Model, af: str, train: Dataset,
            probs: ProbMatrix, batch: int, seed: int) -> np.ndarray:
    """Pick the next batch of sample ids per the acquisition function."""
    unlabeled = state.unlabeled_ids
    if af == "random":
        return acquisition.random_select(unlabeled, batch, seed)

    if af == "coreset":
        # Euclidean distances on the model-standardized features; rows are
        # positions in the training dataset (ascending in sample id).
        std_feats = (train.features - model.feature_mean) / model.feature_scale
        labeled_rows = train.rows_for(state.labeled_ids)
        unlabeled_rows = train.rows_for(unlabeled)
        rows = acquisition.coreset_select(std_feats, labeled_rows,
                                          unlabeled_rows, batch)
        return train.sample_ids[rows]

    margins = acquisition.margin_scores(probs)
    if af == "margin":
        return margins.top(batch)

    if af == "alamp":
        if state.prev_probs is None:
            return margins.top(batch)
        prev_margins = acquisition.margin_scores(state.prev_probs).as_dict()
        pool = acquisition.alamp_scores(prev_margins, margins.as_dict())
        return pool.top(batch)

    current_pseudo = acquisition.pseudo_classes(probs)
    if af == "alamp-div":
        if state.prev_probs is None:
            return acquisition.diversify(margins.order, current_pseudo, batch)
        prev_margins = acquisition.margin_scores(state.prev_probs).as_dict()
        pool = acquisition.alamp_scores(prev_margins, margins.as_dict())
        return acquisition.diversify(pool.order, state.prev_pseudo, batch)
    if af == "marg-div":
        return acquisition.diversify(margins.order, current_pseudo, batch)
    if af == "rand-div":
        rng = np.random.default_rng(seed)
        order = rng.permutation(np.sort(unlabeled))
        return acquisition.diversify(order, current_pseudo, batch)

    raise EngineError(f"unknown acquisition function {af!r}")


def step(state: PoolState, model: Model, af: str, train: Dataset, seed: int,
         batch: int, cost_sensitive: bool = True):
    """One protocol iteration: score, select, label, retrain.

    Returns the new pool state, the retrained model, and a record of the
    selection (test accuracy is filled in by the caller, which owns the test
    set).
    """
    if len(state.unlabeled_ids) < batch:
        raise EngineError("unlabeled pool exhausted")
    k = state.iteration + 1
    step_seed = _step_seed(seed, k)

    unlabeled_rows = train.rows_for(state.unlabeled_ids)
    probs = classifier.predict_proba(model, train.features[unlabeled_rows],
                                     state.unlabeled_ids)
    selected = _select(state, model, af, train, probs, batch, step_seed)

    new_labeled = np.concatenate([state.labeled_ids, selected])
    new_unlabeled = np.setdiff1d(state.unlabeled_ids, selected)
    new_state = PoolState(
        labeled_ids=new_labeled,
        unlabeled_ids=new_unlabeled,
        iteration=k,
        prev_probs=probs,
        prev_pseudo=acquisition.pseudo_classes(probs),
    )
    new_model = _fit(train, new_labeled, cost_sensitive, step_seed)

    counts = train.subset(new_labeled).class_counts()
    record = IterationRecord(
        iteration=k,
        labeled_count=len(new_labeled),
        accuracy=float("nan"),
        class_counts=tuple(int(c) for c in counts),
        ir=imbalance_ratio(counts),
        selected_ids=tuple(int(s) for s in selected),
    )
    return new_state, new_model, record


def run_experiment(train: Dataset, test: Dataset, af: str, plan: BudgetPlan,
                   seed: int, cost_sensitive: bool = True,
                   dataset_name: str = "dataset") -> Report:
    """Full AL cycle: seed batch then t-1 selection/retrain iterations."""
    if af not in AF_NAMES:
        raise EngineError(f"unknown acquisition function {af!r}")
    if train.dim != test.dim or train.n_classes != test.n_classes:
        raise EngineError("train/test dimensionality or class count mismatch")

    state, model = init_pool(train, plan, seed, cost_sensitive)
    counts = train.subset(state.labeled_ids).class_counts()
    records = [IterationRecord(
        iteration=0,
        labeled_count=len(state.labeled_ids),
        accuracy=classifier.accuracy(model, test),
        class_counts=tuple(int(c) for c in counts),
        ir=imbalance_ratio(counts),
        selected_ids=tuple(int(s) for s in state.labeled_ids),
    )]
    for _ in range(plan.iterations - 1):
        state, model, record = step(state, model, af, train, seed, plan.batch,
                                    cost_sensitive)
        records.append(dataclasses.replace(
            record, accuracy=classifier.accuracy(model, test)))

    meta = RunMeta(af=af, seed=seed, total_budget=plan.total_budget,
                   iterations=plan.iterations, dataset=dataset_name,
                   cost_sensitive=cost_sensitive)
    return Report(meta=meta, records=tuple(records))
