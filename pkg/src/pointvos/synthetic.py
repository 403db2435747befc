"""Synthetic videos and mask degraders.

Used to study how benchmark rankings behave when evaluation is restricted
to a few frames: a pool of fake "methods" of graded quality is built by
corrupting ground-truth masks in parametric ways, then scored densely (all
frames) and sparsely (an evenly spaced 3-frame subset).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .masks import as_mask, dilate, distance_transform
from .metrics import boundary_f, jaccard, sparse_dense_correlation
from .sampling import subsample_frames_even

METHOD_COUNT = 18


def make_blob_video(width: int = 96, height: int = 72, frames: int = 24, seed: int = 0) -> list[np.ndarray]:
    """A single elliptical blob drifting across the frame with a breathing
    radius; every frame is non-empty."""
    rng = np.random.default_rng(seed)
    margin_x, margin_y = width * 0.25, height * 0.25
    x_start, x_end = rng.uniform(margin_x, width - margin_x, 2)
    y_start, y_end = rng.uniform(margin_y, height - margin_y, 2)
    base_r = rng.uniform(0.12, 0.2) * min(width, height)
    stretch = rng.uniform(0.7, 1.4)
    phase = rng.uniform(0.0, 2 * np.pi)
    ys, xs = np.ogrid[:height, :width]
    video = []
    for t in range(frames):
        a = t / max(frames - 1, 1)
        cx = x_start + a * (x_end - x_start)
        cy = y_start + a * (y_end - y_start)
        r = base_r * (1.0 + 0.25 * np.sin(phase + 2 * np.pi * a))
        d2 = ((xs - cx) / stretch) ** 2 + (ys - cy) ** 2
        video.append(d2 <= r * r)
    return video


def shift_mask(mask, dx: int, dy: int) -> np.ndarray:
    """Translate a mask, discarding pixels shifted out of the frame."""
    m = as_mask(mask)
    h, w = m.shape
    out = np.zeros_like(m)
    src_y = slice(max(0, -dy), min(h, h - dy))
    src_x = slice(max(0, -dx), min(w, w - dx))
    dst_y = slice(max(0, dy), min(h, h + dy))
    dst_x = slice(max(0, dx), min(w, w + dx))
    out[dst_y, dst_x] = m[src_y, src_x]
    return out


def erode(mask, radius: float) -> np.ndarray:
    """Foreground pixels strictly deeper than `radius` inside the mask."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    m = as_mask(mask)
    if radius == 0:
        return m.copy()
    return distance_transform(m) > radius


def degrade_mask(mask, method: int, rng: np.random.Generator) -> np.ndarray:
    """Corrupt one GT mask with synthetic method #method (0-based).

    Methods cycle through three families (translation, morphology, pixel
    noise) with strength growing every cycle, giving a pool of graded,
    qualitatively different fake predictors.
    """
    if not (0 <= method < METHOD_COUNT):
        raise ValueError(f"method must be in [0, {METHOD_COUNT})")
    m = as_mask(mask)
    family = method % 3
    level = method // 3 + 1
    if family == 0:
        return shift_mask(m, level, -(level // 2))
    if family == 1:
        if level % 2:
            return erode(m, level)
        return dilate(m, level)
    noise = rng.random(m.shape) < 0.015 * level
    return m ^ noise


@dataclass(frozen=True)
class CorrelationResult:
    dense: tuple[float, ...]  # per method, mean J&F over all frames
    sparse: tuple[float, ...]  # per method, mean J&F over 3 frames/video
    rho: float


def correlation_experiment(
    n_videos: int = 30,
    n_methods: int = METHOD_COUNT,
    frames: int = 24,
    width: int = 96,
    height: int = 72,
    sparse_k: int = 3,
    seed: int = 0,
) -> CorrelationResult:
    """Score every synthetic method densely and sparsely, then rank-correlate.

    Per method and video the degraded masks are scored frame by frame; the
    dense score averages all frames, the sparse score only an evenly
    spaced `sparse_k`-frame subset of the same per-frame values.
    """
    videos = [make_blob_video(width, height, frames, seed=seed + 1000 * i) for i in range(n_videos)]
    sparse_idx = subsample_frames_even(frames, sparse_k)
    dense = []
    sparse = []
    for method in range(n_methods):
        rng = np.random.default_rng([seed, method])
        dense_video_means = []
        sparse_video_means = []
        for gt in videos:
            jf = []
            for frame_mask in gt:
                pred = degrade_mask(frame_mask, method, rng)
                jf.append((jaccard(pred, frame_mask) + boundary_f(pred, frame_mask)) / 2.0)
            dense_video_means.append(float(np.mean(jf)))
            sparse_video_means.append(float(np.mean([jf[i] for i in sparse_idx])))
        dense.append(float(np.mean(dense_video_means)))
        sparse.append(float(np.mean(sparse_video_means)))
    rho = sparse_dense_correlation(dense, sparse)
    return CorrelationResult(dense=tuple(dense), sparse=tuple(sparse), rho=rho)
