"""Independent reference implementations used as test oracles.

Everything here is written the slow, obvious way (quadratic scans, direct
set arithmetic, step-by-step replay of documented policies) so the fast
library code can be checked against it.
"""

from __future__ import annotations

import math

import numpy as np

from pointvos.rng import Xoshiro256


def brute_force_distance_transform(mask: np.ndarray) -> np.ndarray:
    """Min Euclidean distance to any background pixel, by scanning all of
    them; all-foreground masks measure to a virtual border ring."""
    m = np.asarray(mask, dtype=bool)
    h, w = m.shape
    out = np.zeros((h, w), dtype=np.float64)
    bg = np.argwhere(~m)
    for y in range(h):
        for x in range(w):
            if not m[y, x]:
                continue
            if bg.size:
                d2 = (bg[:, 0] - y) ** 2 + (bg[:, 1] - x) ** 2
                out[y, x] = math.sqrt(int(d2.min()))
            else:
                out[y, x] = min(x + 1, y + 1, w - x, h - y)
    return out


def brute_force_jaccard(pred: np.ndarray, gt: np.ndarray) -> float:
    """Set-arithmetic IoU over explicit pixel coordinate sets."""
    p = {(y, x) for y, x in np.argwhere(pred)}
    g = {(y, x) for y, x in np.argwhere(gt)}
    if not p and not g:
        return 1.0
    return len(p & g) / len(p | g)


def sequential_min_dist_sample(region: np.ndarray, n: int, d: float, seed: int) -> list[tuple[int, int]]:
    """Direct transcription of the documented rejection policy: up to
    100*n single draws, each accepted iff it clears d against everything
    accepted so far, stopping at n."""
    ys, xs = np.nonzero(np.asarray(region, dtype=bool))
    npix = xs.size
    if npix == 0 or n == 0:
        return []
    gen = Xoshiro256(seed)
    accepted: list[tuple[int, int]] = []
    for _ in range(100 * n):
        if len(accepted) == n:
            break
        i = gen.below(npix)
        x, y = int(xs[i]), int(ys[i])
        if all((x - ax) ** 2 + (y - ay) ** 2 >= d * d for ax, ay in accepted):
            accepted.append((x, y))
    return accepted


def brute_force_fps_second(region: np.ndarray, center: tuple[int, int]) -> tuple[int, int]:
    """The pixel farthest from `center`, ties by smallest (y, x)."""
    ys, xs = np.nonzero(np.asarray(region, dtype=bool))
    cx, cy = center
    best = None
    best_d2 = -1
    for y, x in sorted(zip(ys.tolist(), xs.tolist())):
        d2 = (x - cx) ** 2 + (y - cy) ** 2
        if d2 > best_d2:
            best_d2 = d2
            best = (x, y)
    return best


def spearman_closed_form(a, b) -> float:
    """Spearman rho via average ranks and the Pearson formula."""
    def ranks(v):
        order = sorted(range(len(v)), key=lambda i: v[i])
        r = [0.0] * len(v)
        i = 0
        while i < len(v):
            j = i
            while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
                j += 1
            avg = (i + j) / 2 + 1
            for k in range(i, j + 1):
                r[order[k]] = avg
            i = j + 1
        return r

    ra, rb = ranks(list(a)), ranks(list(b))
    ma = sum(ra) / len(ra)
    mb = sum(rb) / len(rb)
    num = sum((x - ma) * (y - mb) for x, y in zip(ra, rb))
    da = math.sqrt(sum((x - ma) ** 2 for x in ra))
    db = math.sqrt(sum((y - mb) ** 2 for y in rb))
    return num / (da * db)


def random_mask(rng: np.random.Generator, height: int, width: int, p: float | None = None) -> np.ndarray:
    """A random mask with occasional degenerate (empty/full) cases."""
    if p is None:
        p = rng.uniform(0.05, 0.95)
    roll = rng.random()
    if roll < 0.05:
        return np.zeros((height, width), dtype=bool)
    if roll < 0.1:
        return np.ones((height, width), dtype=bool)
    return rng.random((height, width)) < p
