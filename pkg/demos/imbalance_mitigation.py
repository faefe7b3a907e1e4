"""Walkthrough: class imbalance and how diversified selection curbs it.

Starts from a balanced synthetic pool, skews it to a target imbalance ratio
(std/mean of per-class counts), then compares how random selection and
pseudo-class diversified selection propagate that imbalance into the labeled
pool across iterations.
"""

import numpy as np

import alamp
from alamp.engine import BudgetPlan, run_experiment
from alamp.metrics import imbalance_profile

full = alamp.make_synthetic(n_classes=15, per_class=150, dim=16,
                            cluster_std=0.9, seed=0)
train, test = alamp.train_test_split(full, test_fraction=0.2, seed=1)

# Skew the training pool: per-class counts follow a linear profile over a
# random class order, solved to land within 0.02 of the target ratio.
skewed = alamp.induce_imbalance(train, target_ir=0.74, min_per_class=5, seed=0)
pool_ir = alamp.imbalance_ratio(skewed.class_counts())
print(f"training pool: {skewed.n_samples} samples, imbalance ratio {pool_ir:.3f}")
print(f"per-class counts: {sorted(skewed.class_counts().tolist())}")

plan = BudgetPlan(total_budget=300, iterations=5)
seeds = range(3)

for af in ("random", "alamp-div"):
    profiles = []
    for seed in seeds:
        report = run_experiment(skewed, test, af, plan, seed)
        profiles.append(imbalance_profile(report))
    mean_profile = np.mean(profiles, axis=0)
    pretty = " ".join(f"{v:.3f}" for v in mean_profile)
    print(f"{af:<10} labeled-pool ir per iteration: {pretty}")

print("\nrandom selection mirrors the pool's imbalance; the diversified")
print("variant spreads picks across predicted classes and keeps the labeled")
print("subset closer to balance, which is where its accuracy edge on")
print("imbalanced data comes from.")
