#!/usr/bin/env python3
"""The evaluation metrics on their own: DTW, Mahalanobis cost, DFD, alignment.

Small hand-built sequences first, so the numbers are checkable by eye,
then the full report machinery over a trained fold (if demo 02 ran).
"""

from pathlib import Path

import numpy as np

from zshar import (
    CostModel,
    SkeletonSequence,
    dfd,
    dtw_distance,
    estimate_cost_model,
    evaluate_fold,
    load_checkpoint,
    load_dataset,
    mahalanobis_cost,
)
from zshar.metrics import render_alignment_table, render_realism_table

# --- Mahalanobis frame cost -------------------------------------------------
# with identity covariance it is plain Euclidean distance; an anisotropic
# covariance discounts differences along high-variance directions
eye = CostModel(S=np.eye(2), eps=1e-12)
aniso = CostModel(S=np.diag([4.0, 1.0]), eps=1e-12)
a, b = np.array([2.0, 0.0]), np.array([0.0, 0.0])
print(f"frame cost, identity covariance:     {mahalanobis_cost(a, b, eye):.3f}")
print(f"frame cost, variance 4 along axis 0: {mahalanobis_cost(a, b, aniso):.3f}")

# --- DTW under time warping ---------------------------------------------------
# the same arc traversed at different speeds: DTW stays near zero while a
# frame-by-frame comparison would not
t_fast = np.linspace(0, np.pi, 10)
t_slow = np.linspace(0, np.pi, 25)
arc_fast = np.stack([np.sin(t_fast), np.cos(t_fast)], axis=1)[:, None, :] * 0.8
arc_slow = np.stack([np.sin(t_slow), np.cos(t_slow)], axis=1)[:, None, :] * 0.8
shifted = np.clip(arc_fast + 0.5, -1, 1)
X = SkeletonSequence("arc", arc_fast)
print(f"\nDTW same arc, different speeds: "
      f"{dtw_distance(X, SkeletonSequence('arc', arc_slow), eye):.3f}")
print(f"DTW arc vs shifted copy:        "
      f"{dtw_distance(X, SkeletonSequence('arc', shifted), eye):.3f}")

# --- discrete Frechet distance ---------------------------------------------
# the dog-leash distance: a constant offset of 0.5 gives exactly 0.5*sqrt(2)
# because both coordinates shift
print(f"DFD arc vs shifted copy:        {dfd(X, SkeletonSequence('arc', shifted)):.3f}")
print(f"DFD arc vs itself:              {dfd(X, X):.3f}")

# --- full evaluation report ---------------------------------------------------
out_root = Path(__file__).parent / "_output"
ckpt_path = out_root / "demo_checkpoint.ckpt"
if ckpt_path.exists():
    ckpt = load_checkpoint(ckpt_path)
    dataset = load_dataset(out_root / "dataset" / "manifest.json")
    result = evaluate_fold(dataset, ckpt.fold, ckpt.params)
    print(f"\nunseen average accuracy per class: {result.accuracy:.3f}")
    print("\nexplanation alignment (TSA/PSA over correct/incorrect predictions,")
    print("OA over all, ADD = mean DTW distance to the matching seen class):")
    print(render_alignment_table({dataset.manifest.name: result.alignment}))
    print("\nexplanation realism (discrete Frechet distance to the match):")
    print(render_realism_table({dataset.manifest.name: result.realism}))
else:
    print("\n(run demos/02_train_zero_shot_model.py to see the full report part)")
