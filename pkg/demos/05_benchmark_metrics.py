"""
Region and contour quality, and the benchmark aggregates
========================================================

J is intersection-over-union, F is a boundary F-measure under a
resolution-scaled pixel tolerance, and the benchmark averages J&F over
runs initialized with 1, 2, 5, and 10 points.
"""

import numpy as np

from pointvos.metrics import (
    benchmark_report,
    boundary_f,
    default_tolerance,
    evaluate_object,
    jaccard,
    split_report,
)
from pointvos.synthetic import make_blob_video, shift_mask

gt = make_blob_video(width=128, height=96, frames=6, seed=9)

print("boundary tolerance at 854x480:", default_tolerance(854, 480), "px")
print("boundary tolerance at 128x96: ", default_tolerance(128, 96), "px")

# Predictions that drift further off the truth score lower.
for dx in (0, 2, 6, 12):
    pred = shift_mask(gt[0], dx, 0)
    j = jaccard(pred, gt[0])
    f = boundary_f(pred, gt[0])
    print(f"shift {dx:2d}px: J {j:.3f}  F {f:.3f}")

# Per-object scores average frame-wise J and F.
preds = {i: shift_mask(m, 2, 1) for i, m in enumerate(gt)}
score = evaluate_object(preds, dict(enumerate(gt)))
print(f"object score: J {score.j:.3f}  F {score.f:.3f}  J&F {score.jf:.3f}")

# The headline table row: one mean J&F per point-count initialization.
report = benchmark_report({1: 48.6, 2: 57.8, 5: 65.5, 10: 67.7})
print(report.render())

# Aggregation over seen and unseen object classes.
split = split_report(
    {"cat": (62.5, 64.7), "axolotl": (47.7, 53.7)},
    {"cat": "seen", "axolotl": "unseen"},
)
print(split.render())
