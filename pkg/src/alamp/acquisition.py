"""Acquisition functions: score and select unlabeled samples for annotation.

Implements random selection, margin uncertainty sampling, greedy k-center
coreset selection, the cross-iteration certainty-shift score (alamp), and the
pseudo-class diversification pass used by the *-div strategies.

All orderings break ties by ascending sample id so results are reproducible
across platforms and thread counts.
"""

from __future__ import annotations

import dataclasses
from typing import Mapping

import numpy as np

from .classifier import ProbMatrix

__all__ = [
    "ScoredPool",
    "AcquisitionError",
    "margin_scores",
    "alamp_scores",
    "random_select",
    "coreset_select",
    "diversify",
    "pseudo_classes",
]


class AcquisitionError(ValueError):
    """Raised for invalid acquisition inputs."""


@dataclasses.dataclass(frozen=True)
class ScoredPool:
    """Scores for an unlabeled pool plus the induced selection order.

    `order` is a permutation of sample_ids sorted per the acquisition
    function's direction; equal scores appear in ascending id order.
    """

    sample_ids: np.ndarray
    scores: np.ndarray
    order: np.ndarray

    def as_dict(self) -> dict:
        return {int(s): float(v) for s, v in zip(self.sample_ids, self.scores)}

    def top(self, batch: int) -> np.ndarray:
        return self.order[:batch]


def _ordered(ids: np.ndarray, scores: np.ndarray, descending: bool) -> np.ndarray:
    key = -scores if descending else scores
    return ids[np.lexsort((ids, key))]


def margin_scores(probs: ProbMatrix) -> ScoredPool:
    """Top-2 probability gap per sample, ordered ascending (uncertain first)."""
    p = probs.probs
    if p.shape[1] < 2:
        raise AcquisitionError("margin needs at least 2 classes")
    top2 = np.partition(p, p.shape[1] - 2, axis=1)[:, -2:]
    scores = top2[:, 1] - top2[:, 0]
    ids = probs.sample_ids
    return ScoredPool(sample_ids=ids, scores=scores,
                      order=_ordered(ids, scores, descending=False))


def alamp_scores(marg_prev: Mapping[int, float],
                 marg_curr: Mapping[int, float]) -> ScoredPool:
    """Relative certainty shift between iterations, ordered descending.

    score(x) = (m_prev - m_curr) / (m_prev + m_curr); 0 when both margins are
    zero. Samples whose prediction moved from certain to uncertain rank first.
    """
    ids = np.array(sorted(marg_curr), dtype=np.int64)
    missing = [int(i) for i in ids if i not in marg_prev]
    if missing:
        raise AcquisitionError(
            f"sample {missing[0]} has no previous-iteration margin")
    prev = np.array([marg_prev[int(i)] for i in ids])
    curr = np.array([marg_curr[int(i)] for i in ids])
    total = prev + curr
    scores = np.where(total > 0, (prev - curr) / np.where(total > 0, total, 1.0), 0.0)
    return ScoredPool(sample_ids=ids, scores=scores,
                      order=_ordered(ids, scores, descending=True))


def random_select(pool_ids, batch: int, seed: int) -> np.ndarray:
    """Uniform sample without replacement, deterministic per seed."""
    pool = np.sort(np.asarray(pool_ids, dtype=np.int64))
    if batch > len(pool):
        raise AcquisitionError(f"batch {batch} exceeds pool size {len(pool)}")
    rng = np.random.default_rng(seed)
    return rng.choice(pool, size=batch, replace=False)


def coreset_select(features, labeled_ids, unlabeled_ids, batch: int) -> np.ndarray:
    """Greedy k-center selection (min-max coverage of the feature space).

    Repeatedly picks the unlabeled point whose distance to its nearest
    covered point (labeled or already selected) is largest; ties go to the
    lowest sample id. `features` is indexed by sample id (row = id).
    """
    features = np.asarray(features, dtype=np.float64)
    labeled = np.asarray(labeled_ids, dtype=np.int64)
    unlabeled = np.sort(np.asarray(unlabeled_ids, dtype=np.int64))
    if len(labeled) == 0:
        raise AcquisitionError("coreset needs a non-empty labeled set")
    if batch > len(unlabeled):
        raise AcquisitionError(f"batch {batch} exceeds pool size {len(unlabeled)}")

    u_feats = features[unlabeled]
    u_sq = (u_feats ** 2).sum(axis=1)
    min_dist = np.full(len(unlabeled), np.inf)
    # chunk over labeled points to bound the distance-matrix footprint
    for start in range(0, len(labeled), 2048):
        block = features[labeled[start:start + 2048]]
        sq = np.maximum(
            u_sq[:, None] + (block ** 2).sum(axis=1)[None, :] - 2.0 * (u_feats @ block.T),
            0.0)
        min_dist = np.minimum(min_dist, np.sqrt(sq.min(axis=1)))

    selected = []
    taken = np.zeros(len(unlabeled), dtype=bool)
    for _ in range(batch):
        best = np.where(taken, -np.inf, min_dist)
        pick = int(np.argmax(best))  # argmax returns the first (lowest id) max
        selected.append(int(unlabeled[pick]))
        taken[pick] = True
        d_new = np.sqrt(((u_feats - u_feats[pick]) ** 2).sum(axis=1))
        min_dist = np.minimum(min_dist, d_new)
    return np.array(selected, dtype=np.int64)


def diversify(ordered_ids, pseudo: Mapping[int, int], batch: int) -> np.ndarray:
    """Spread a ranked selection across pseudo classes.

    Repeated passes over the ranking: within a pass each pseudo class
    contributes at most one new sample. Passes repeat until the batch is
    filled; the result keeps selection order and is truncated to the batch.
    """
    ordered = [int(i) for i in ordered_ids]
    if batch > len(ordered):
        raise AcquisitionError(f"batch {batch} exceeds pool size {len(ordered)}")
    missing = [i for i in ordered if i not in pseudo]
    if missing:
        raise AcquisitionError(f"sample {missing[0]} has no pseudo class")
    selected = []
    chosen = set()
    while len(selected) < batch:
        seen_classes = set()
        for sid in ordered:
            cls = pseudo[sid]
            if cls not in seen_classes and sid not in chosen:
                selected.append(sid)
                chosen.add(sid)
                seen_classes.add(cls)
    return np.array(selected[:batch], dtype=np.int64)


def pseudo_classes(probs: ProbMatrix) -> dict:
    """Predicted class per scored sample (argmax, ties to lowest class id)."""
    top = np.argmax(probs.probs, axis=1)
    return {int(s): int(c) for s, c in zip(probs.sample_ids, top)}
