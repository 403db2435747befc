"""Binary-mask and probability-map primitives.

Grid conventions used throughout the package:

* A binary mask is a 2-D numpy bool array of shape ``(height, width)``,
  row-major, so ``mask[y, x]`` addresses column ``x`` of row ``y``.
* A probability map is a 2-D float64 array of the same layout with every
  value in ``[0, 1]``.
* Run-length encoding is column-major (pixel order ``(x=0,y=0), (x=0,y=1),
  ...``) with runs alternating background/foreground starting at background;
  a leading zero marks a foreground first pixel.  This is the COCO-style
  uncompressed counts layout, so exported masks interoperate with common
  VOS tooling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage


@dataclass(frozen=True)
class Rle:
    """Column-major run-length encoding of a binary mask.

    Construction enforces the codec invariants, so every Rle instance is
    decodable.
    """

    width: int
    height: int
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"RLE dimensions must be positive, got {self.width}x{self.height}")
        if any(c < 0 for c in self.counts):
            raise ValueError("RLE counts must be non-negative")
        if any(c == 0 for c in self.counts[1:]):
            raise ValueError("RLE counts must not contain interior zeros")
        total = sum(self.counts)
        expected = self.width * self.height
        if total != expected:
            raise ValueError(f"RLE counts sum to {total}, expected width*height = {expected}")

    def to_json(self) -> dict:
        return {"width": self.width, "height": self.height, "counts": list(self.counts)}

    @classmethod
    def from_json(cls, obj: dict) -> "Rle":
        return cls(int(obj["width"]), int(obj["height"]), tuple(int(c) for c in obj["counts"]))


def as_mask(a) -> np.ndarray:
    """Validate and return `a` as a 2-D bool mask array."""
    m = np.asarray(a)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"mask must be a 2-D grid with positive dimensions, got shape {m.shape}")
    if m.dtype != bool:
        m = m.astype(bool)
    return m


def as_probability_map(a) -> np.ndarray:
    """Validate and return `a` as a 2-D float64 map with values in [0, 1]."""
    p = np.asarray(a, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] < 1 or p.shape[1] < 1:
        raise ValueError(f"probability map must be a 2-D grid, got shape {p.shape}")
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        raise ValueError("probability map values must lie in [0, 1]")
    return p


def rle_encode(mask) -> Rle:
    """Encode a binary mask as column-major alternating run lengths.

    Decoding the result reproduces the mask bit-exactly.
    """
    m = as_mask(mask)
    h, w = m.shape
    flat = m.ravel(order="F")
    changes = np.flatnonzero(np.diff(flat.view(np.int8)))
    edges = np.concatenate(([0], changes + 1, [flat.size]))
    counts = np.diff(edges).tolist()
    if flat[0]:
        counts.insert(0, 0)
    return Rle(width=w, height=h, counts=tuple(int(c) for c in counts))


def rle_decode(rle: Rle) -> np.ndarray:
    """Inverse of :func:`rle_encode`.

    Malformed counts (negative, interior zero, or not summing to
    width*height) are rejected when the Rle is constructed.
    """
    counts = rle.counts
    flat = np.zeros(rle.width * rle.height, dtype=bool)
    pos = 0
    value = False
    for c in counts:
        if value:
            flat[pos : pos + c] = True
        pos += c
        value = not value
    return flat.reshape((rle.height, rle.width), order="F")


def distance_transform(mask) -> np.ndarray:
    """Exact Euclidean distance from each foreground pixel to the nearest
    background pixel; zero on background.

    A mask with no background at all measures against a virtual one-pixel
    background ring just outside the image border.
    """
    m = as_mask(mask)
    if not m.any():
        return np.zeros(m.shape, dtype=np.float64)
    if m.all():
        padded = np.pad(m, 1, constant_values=False)
        return ndimage.distance_transform_edt(padded)[1:-1, 1:-1]
    return ndimage.distance_transform_edt(m)


def boundary(mask) -> np.ndarray:
    """Foreground pixels 4-adjacent to background or to the image border."""
    m = as_mask(mask)
    p = np.pad(m, 1, constant_values=False)
    interior = p[:-2, 1:-1] & p[2:, 1:-1] & p[1:-1, :-2] & p[1:-1, 2:]
    return m & ~interior


def dilate(mask, radius: float) -> np.ndarray:
    """Pixels within Euclidean distance <= radius of a foreground pixel."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    m = as_mask(mask)
    if not m.any():
        return m.copy()
    dist_to_fg = ndimage.distance_transform_edt(~m)
    # Distances are sqrt of integer squared offsets; the slack only absorbs
    # float rounding, never admits the next-larger integer distance.
    return dist_to_fg <= radius + 1e-9
