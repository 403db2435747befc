"""
Binary masks: RLE codec, distance transform, boundaries
=======================================================

The mask primitives everything else builds on.
"""

import numpy as np

from pointvos.masks import boundary, dilate, distance_transform, rle_decode, rle_encode

# A small disc on a 16x20 canvas.
ys, xs = np.mgrid[:16, :20]
disc = (ys - 8) ** 2 + (xs - 10) ** 2 <= 25

# Round-trip through column-major run-length encoding.  The counts always
# start with a background run, so a mask whose first pixel is foreground
# gets a leading zero.
rle = rle_encode(disc)
print(f"disc: {disc.sum()} px -> {len(rle.counts)} runs, first counts {rle.counts[:4]}")
assert np.array_equal(rle_decode(rle), disc)

# The wire form is plain JSON.
print("wire:", rle.to_json()["counts"][:6], "...")

# Exact Euclidean distance to the nearest background pixel.  The center of
# the disc is the deepest point.
dt = distance_transform(disc)
peak = np.unravel_index(np.argmax(dt), dt.shape)
print(f"deepest interior point {peak}, depth {dt.max():.2f} px")

# The boundary is the set of foreground pixels touching background; it is
# what the contour-quality metric compares.
ring = boundary(disc)
print(f"boundary ring: {ring.sum()} px")

# Dilation grows a mask by a radius; the metric uses it to tolerate small
# contour misalignments.
grown = dilate(ring, 2.0)
print(f"ring dilated by 2 px covers {grown.sum()} px")
