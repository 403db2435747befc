"""File formats for masks and probability maps.

Masks travel as 8-bit grayscale PNGs (0 = background, 255 = foreground).
Probability maps are either grayscale PNGs (p = v / 255) or the raw "PVPM"
format: magic ``PVPM``, little-endian u32 width, u32 height, then
width*height little-endian float32 values row-major.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .masks import as_mask, as_probability_map

PVPM_MAGIC = b"PVPM"


def save_mask_png(mask, path) -> None:
    m = as_mask(mask)
    img = Image.fromarray(np.where(m, 255, 0).astype(np.uint8), mode="L")
    img.save(path, format="PNG")


def load_mask_png(path) -> np.ndarray:
    img = Image.open(path).convert("L")
    arr = np.asarray(img)
    return as_mask(arr >= 128)


def save_probability_png(pmap, path) -> None:
    p = as_probability_map(pmap)
    img = Image.fromarray(np.round(p * 255.0).astype(np.uint8), mode="L")
    img.save(path, format="PNG")


def load_probability_png(path) -> np.ndarray:
    img = Image.open(path).convert("L")
    arr = np.asarray(img, dtype=np.float64) / 255.0
    return as_probability_map(arr)


def save_probability_pvpm(pmap, path) -> None:
    p = as_probability_map(pmap)
    h, w = p.shape
    with open(path, "wb") as f:
        f.write(PVPM_MAGIC)
        f.write(struct.pack("<II", w, h))
        f.write(p.astype("<f4").tobytes(order="C"))


def load_probability_pvpm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != PVPM_MAGIC:
        raise ValueError(f"{path}: not a PVPM file (bad magic)")
    w, h = struct.unpack("<II", data[4:12])
    expected = 12 + 4 * w * h
    if len(data) != expected:
        raise ValueError(f"{path}: PVPM payload is {len(data)} bytes, expected {expected}")
    values = np.frombuffer(data, dtype="<f4", offset=12).reshape((h, w))
    return as_probability_map(values.astype(np.float64))


def load_probability_map(path) -> np.ndarray:
    """Load a probability map from either supported format, by extension."""
    path = Path(path)
    if path.suffix.lower() == ".pvpm":
        return load_probability_pvpm(path)
    return load_probability_png(path)
