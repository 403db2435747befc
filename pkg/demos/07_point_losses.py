"""
Training losses on sparse points
================================

Cross entropy evaluated only at labeled points, with bilinear sampling of
the probability map, and a hinged variant whose gradient stays bounded on
confidently wrong points.
"""

import numpy as np

from pointvos.losses import LabeledPoint, bilinear_sample, huberised_ce, pointwise_ce
from pointvos.sampling import Point

ys, xs = np.mgrid[:32, :32]
pmap = np.clip(1.0 - np.hypot(ys - 16, xs - 16) / 12.0, 0.02, 0.98)

# Bilinear sampling reads the map at fractional coordinates.
for xy in ((16.5, 16.5), (16.73, 16.21), (2.0, 2.0)):
    print(f"q{xy} = {bilinear_sample(pmap, Point(*xy)):.3f}")

points = [
    LabeledPoint(Point(16.5, 16.5), "positive"),   # confident and right
    LabeledPoint(Point(25.0, 16.0), "positive"),   # near the rim
    LabeledPoint(Point(3.0, 3.0), "negative"),     # easy background
    LabeledPoint(Point(16.0, 18.0), "negative"),   # mislabeled on purpose
]
result = pointwise_ce(pmap, points)
print(f"\nmean point CE: {result.loss:.4f}")
for lp, q, g in zip(points, result.probabilities, result.gradients):
    print(f"  {lp.label:8s} q={q:.3f}  dloss/dq={g:+.3f}")

# Plain CE blows up as the true-label probability approaches zero; the
# hinged form switches to a tangent line below tau, capping the gradient.
print("\n      q     plain-CE grad   hinged grad (tau=0.1)")
for q in (0.5, 0.2, 0.1, 0.02, 0.001):
    plain = -1.0 / q
    hinged = huberised_ce(q, 1, tau=0.1)[1]
    print(f"  {q:6.3f}   {plain:12.1f}   {hinged:10.1f}")
