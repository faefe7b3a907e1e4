"""Deterministic multi-class linear classifier over fixed embeddings.

One-vs-rest linear models trained with full-batch gradient descent on a
cost-weighted squared-hinge loss plus L2 penalty. Zero initialization and a
fixed iteration budget make training bit-reproducible: the same inputs always
yield the same model, regardless of seed or thread count.

Features are standardized per dimension using statistics of the training
(labeled) pool; the scaler is stored on the model and applied to every pool
it scores.
"""

from __future__ import annotations

import dataclasses

import numpy as np

__all__ = [
    "Model",
    "ProbMatrix",
    "ClassifierError",
    "DEFAULT_REG_GRID",
    "class_weights",
    "objective",
    "gradients",
    "train",
    "select_reg_param",
    "decision_values",
    "predict_proba",
    "predict",
    "accuracy",
]

GD_ITERATIONS = 500
DEFAULT_REG_GRID = (1e-3, 1e-2, 1e-1, 1.0, 10.0)


class ClassifierError(ValueError):
    """Raised for invalid training or prediction inputs."""


@dataclasses.dataclass(frozen=True)
class Model:
    """Per-class linear decision functions d_c(x) = w_c . z + b_c.

    z is the standardized feature vector: (x - feature_mean) / feature_scale.
    """

    weights: np.ndarray        # (n_classes, dim)
    biases: np.ndarray         # (n_classes,)
    reg_param: float
    class_weights: np.ndarray  # (n_classes,)
    feature_mean: np.ndarray   # (dim,)
    feature_scale: np.ndarray  # (dim,), 1.0 for constant dimensions

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


@dataclasses.dataclass(frozen=True)
class ProbMatrix:
    """Per-sample class-probability rows, aligned with sample_ids."""

    probs: np.ndarray       # (n_scored, n_classes), rows sum to 1
    sample_ids: np.ndarray  # (n_scored,)

    def row_for(self, sample_id: int) -> np.ndarray:
        pos = np.flatnonzero(self.sample_ids == sample_id)
        if len(pos) == 0:
            raise KeyError(sample_id)
        return self.probs[pos[0]]

    def restrict(self, sample_ids) -> "ProbMatrix":
        """Rows for the given ids, in the given order."""
        lookup = {int(s): i for i, s in enumerate(self.sample_ids)}
        rows = np.array([lookup[int(s)] for s in sample_ids], dtype=np.int64)
        return ProbMatrix(probs=self.probs[rows],
                          sample_ids=np.asarray(sample_ids, dtype=np.int64))


def class_weights(counts) -> np.ndarray:
    """Cost-sensitive weights w_c = n_samples / (n_classes * count_c).

    Classes with zero count get the weight they would have at count 1, so the
    weight vector stays finite when the labeled pool misses a class.
    """
    counts = np.asarray(counts, dtype=np.float64)
    n_classes = len(counts)
    n_samples = counts.sum()
    effective = np.where(counts > 0, counts, 1.0)
    return n_samples / (n_classes * effective)


def _standardizer(features: np.ndarray):
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    scale = np.where(std > 0, std, 1.0)
    return mean, scale


def objective(weights, biases, z, targets, sample_w, reg_param):
    """Weighted squared-hinge + L2 objective (biases unregularized)."""
    margins = z @ weights.T + biases
    viol = np.maximum(0.0, 1.0 - targets * margins)
    data_term = (sample_w[:, None] * viol ** 2).sum() / len(z)
    return data_term + reg_param * (weights ** 2).sum()


def gradients(weights, biases, z, targets, sample_w, reg_param):
    """Analytic gradient of `objective` w.r.t. weights and biases."""
    margins = z @ weights.T + biases
    viol = np.maximum(0.0, 1.0 - targets * margins)
    grad_margin = (-2.0 / len(z)) * (sample_w[:, None] * targets * viol)
    grad_w = grad_margin.T @ z + 2.0 * reg_param * weights
    grad_b = grad_margin.sum(axis=0)
    return grad_w, grad_b


def train(features, labels, class_weights_vec, reg_param: float, seed: int = 0) -> Model:
    """Fit one-vs-rest linear models by full-batch gradient descent.

    Deterministic: zero-initialized, fixed learning rate 0.1 / (1 + reg_param),
    500 iterations. The seed argument is accepted for interface uniformity but
    does not influence the result.
    """
    del seed
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    cw = np.asarray(class_weights_vec, dtype=np.float64)
    if not reg_param > 0:
        raise ClassifierError("reg_param must be positive")
    if not np.all(np.isfinite(features)):
        raise ClassifierError("non-finite features")
    if len(np.unique(labels)) < 2:
        raise ClassifierError("need at least 2 distinct labels to train")
    n_classes = len(cw)
    n, dim = features.shape

    mean, scale = _standardizer(features)
    z = (features - mean) / scale
    targets = np.full((n, n_classes), -1.0)
    targets[np.arange(n), labels] = 1.0
    sample_w = cw[labels]

    weights = np.zeros((n_classes, dim))
    biases = np.zeros(n_classes)
    lr = 0.1 / (1.0 + reg_param)
    for _ in range(GD_ITERATIONS):
        grad_w, grad_b = gradients(weights, biases, z, targets, sample_w, reg_param)
        weights -= lr * grad_w
        biases -= lr * grad_b

    return Model(weights=weights, biases=biases, reg_param=float(reg_param),
                 class_weights=cw, feature_mean=mean, feature_scale=scale)


def _stratified_folds(labels: np.ndarray, folds: int, seed: int):
    """Round-robin per-class assignment of shuffled indices to folds."""
    rng = np.random.default_rng(seed)
    assignment = np.empty(len(labels), dtype=np.int64)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        rng.shuffle(idx)
        assignment[idx] = np.arange(len(idx)) % folds
    return assignment


def select_reg_param(features, labels, candidate_grid=DEFAULT_REG_GRID,
                     folds: int = 3, seed: int = 0) -> float:
    """Pick the regularization strength by stratified k-fold CV accuracy.

    Ties go to the smallest candidate. Folds are reduced to the minimum class
    count when a class is too small, with a floor of 2.
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    grid = sorted(float(c) for c in candidate_grid)
    if not grid:
        raise ClassifierError("empty candidate grid")
    if folds < 2:
        raise ClassifierError("folds must be >= 2")
    present, counts = np.unique(labels, return_counts=True)
    if len(present) < 2:
        raise ClassifierError("need at least 2 classes for cross-validation")
    min_count = int(counts.min())
    if min_count < 2:
        raise ClassifierError("every class needs at least 2 samples for CV")
    folds = min(folds, max(2, min_count))
    n_classes = int(labels.max()) + 1

    assignment = _stratified_folds(labels, folds, seed)
    best_reg, best_acc = None, -1.0
    for reg in grid:
        fold_accs = []
        for f in range(folds):
            tr = assignment != f
            va = ~tr
            cw = class_weights(np.bincount(labels[tr], minlength=n_classes))
            model = train(features[tr], labels[tr], cw, reg)
            preds = predict(model, features[va])
            fold_accs.append(float(np.mean(preds == labels[va])))
        mean_acc = float(np.mean(fold_accs))
        if mean_acc > best_acc:
            best_reg, best_acc = reg, mean_acc
    return best_reg


def decision_values(model: Model, features) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.shape[1] != model.dim:
        raise ClassifierError(
            f"feature dim {features.shape[1]} does not match model dim {model.dim}")
    z = (features - model.feature_mean) / model.feature_scale
    return z @ model.weights.T + model.biases


def predict_proba(model: Model, features, sample_ids=None) -> ProbMatrix:
    """Softmax over decision values; rows sum to 1 within 1e-6."""
    dv = decision_values(model, features)
    shifted = dv - dv.max(axis=1, keepdims=True)
    ex = np.exp(shifted)
    probs = ex / ex.sum(axis=1, keepdims=True)
    if sample_ids is None:
        sample_ids = np.arange(len(probs), dtype=np.int64)
    return ProbMatrix(probs=probs, sample_ids=np.asarray(sample_ids, dtype=np.int64))


def predict(model: Model, features) -> np.ndarray:
    """Argmax of decision values per row, ties to the lowest class id."""
    return np.argmax(decision_values(model, features), axis=1)


def accuracy(model: Model, test) -> float:
    """Fraction of test samples predicted correctly."""
    if test.n_samples == 0:
        raise ClassifierError("empty test set")
    return float(np.mean(predict(model, test.features) == test.labels))
