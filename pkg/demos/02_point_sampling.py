"""
Point sampling inside regions
=============================

Rejection sampling with a minimum pairwise distance, and farthest-point
sampling seeded at the region's deepest pixel.
"""

import numpy as np

from pointvos.sampling import mask_center, sample_fps, sample_random_min_dist

ys, xs = np.mgrid[:48, :64]
region = (ys - 24) ** 2 + (xs - 32) ** 2 <= 400

# Random points that keep a minimum spacing.  The draw sequence is fixed
# by the seed, so the same call always returns the same points.
pts = sample_random_min_dist(region, n=6, d=8.0, seed=42)
print("min-dist points:", [(p.col, p.row) for p in pts])
gaps = [
    np.hypot(a.x - b.x, a.y - b.y)
    for i, a in enumerate(pts)
    for b in pts[i + 1 :]
]
print(f"smallest pairwise gap {min(gaps):.2f} px (floor was 8)")

# Farthest-point sampling starts at the most interior pixel and then
# repeatedly takes the point farthest from everything chosen so far.
center = mask_center(region)
fps = sample_fps(region, n=5)
print("fps seed:", (center.col, center.row))
print("fps points:", [(p.col, p.row) for p in fps])

# The min gap of the FPS prefix never increases as points are added.
for k in range(2, 6):
    prefix = fps[:k]
    gap = min(
        np.hypot(a.x - b.x, a.y - b.y)
        for i, a in enumerate(prefix)
        for b in prefix[i + 1 :]
    )
    print(f"  first {k}: min gap {gap:.1f}")
