"""Reference numerics for point-supervised training.

Probabilities are read off a map by bilinear interpolation at continuous
point locations (pixel centers sit at half-integer coordinates, matching
the sampling module); the losses and their analytic gradients are taken
with respect to those sampled probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .masks import as_probability_map
from .sampling import Point


@dataclass(frozen=True)
class LabeledPoint:
    point: Point
    label: str  # "positive" (y=1) or "negative" (y=0)

    def __post_init__(self):
        if self.label not in ("positive", "negative"):
            raise ValueError(f"bad loss label {self.label!r}")

    @property
    def y(self) -> int:
        return 1 if self.label == "positive" else 0


@dataclass(frozen=True)
class LossResult:
    """Mean loss over points plus per-point ∂loss/∂q at the sampled
    probabilities q."""

    loss: float
    gradients: tuple[float, ...]
    probabilities: tuple[float, ...]


def rasterize_points(points, width: int, height: int) -> np.ndarray:
    """A mask that is foreground exactly at the positive points' pixels.

    Negative points are consumed by the losses, not by the initialization
    mask, so they are not rasterized.
    """
    mask = np.zeros((height, width), dtype=bool)
    for lp in points:
        x, y = lp.point.pixel()
        if not (0 <= x < width and 0 <= y < height):
            raise ValueError(f"point ({lp.point.x}, {lp.point.y}) outside {width}x{height}")
        if lp.y == 1:
            mask[y, x] = True
    return mask


def bilinear_sample(pmap, pt: Point) -> float:
    """Bilinear interpolation over the 4 nearest pixel centers, with
    clamped replication at the borders."""
    p = as_probability_map(pmap)
    h, w = p.shape
    if not (0 <= pt.x < w and 0 <= pt.y < h):
        raise ValueError(f"point ({pt.x}, {pt.y}) outside {w}x{h}")
    gx = min(max(pt.x - 0.5, 0.0), w - 1.0)
    gy = min(max(pt.y - 0.5, 0.0), h - 1.0)
    x0 = int(math.floor(gx))
    y0 = int(math.floor(gy))
    x1 = min(x0 + 1, w - 1)
    y1 = min(y0 + 1, h - 1)
    wx = gx - x0
    wy = gy - y0
    top = p[y0, x0] * (1.0 - wx) + p[y0, x1] * wx
    bottom = p[y1, x0] * (1.0 - wx) + p[y1, x1] * wx
    return float(top * (1.0 - wy) + bottom * wy)


def pointwise_ce_from_q(qs, ys, eps: float = 1e-7) -> LossResult:
    """Cross entropy of already-sampled probabilities against 0/1 labels.

    loss = -mean_i [ y_i*log(q_i + eps) + (1 - y_i)*log(1 - q_i + eps) ];
    gradients are ∂loss/∂q_i of that mean.
    """
    qs = [float(q) for q in qs]
    ys = [int(y) for y in ys]
    if len(qs) != len(ys):
        raise ValueError("probability and label counts differ")
    if not qs:
        raise ValueError("need at least one point")
    if eps <= 0:
        raise ValueError("eps must be > 0")
    n = len(qs)
    loss = 0.0
    grads = []
    for q, y in zip(qs, ys):
        if y == 1:
            loss -= math.log(q + eps)
            grads.append(-1.0 / (n * (q + eps)))
        else:
            loss -= math.log(1.0 - q + eps)
            grads.append(1.0 / (n * (1.0 - q + eps)))
    return LossResult(loss=loss / n, gradients=tuple(grads), probabilities=tuple(qs))


def pointwise_ce(pmap, points, eps: float = 1e-7) -> LossResult:
    """Point-wise cross entropy: bilinear-sample the map at each labeled
    point, then average the per-point log losses."""
    points = list(points)
    if not points:
        raise ValueError("need at least one point")
    qs = [bilinear_sample(pmap, lp.point) for lp in points]
    return pointwise_ce_from_q(qs, [lp.y for lp in points], eps)


def huberised_ce(q: float, y: int, tau: float = 0.1) -> tuple[float, float]:
    """Cross entropy with a linear extension below probability tau.

    With p the probability assigned to the true label (q for y=1, 1-q for
    y=0): loss = -log p when p >= tau, and the tangent continuation
    -log tau + (tau - p)/tau when p < tau.  Gradient magnitude is capped
    at 1/tau, so the loss stays finite at p = 0.  Returns (loss, dloss/dq).
    """
    if not (0.0 <= q <= 1.0):
        raise ValueError("q must lie in [0, 1]")
    if y not in (0, 1):
        raise ValueError("y must be 0 or 1")
    if not (0.0 < tau < 1.0):
        raise ValueError("tau must lie in (0, 1)")
    p = q if y == 1 else 1.0 - q
    dp_dq = 1.0 if y == 1 else -1.0
    if p >= tau:
        loss = -math.log(p)
        dloss_dp = -1.0 / p
    else:
        loss = -math.log(tau) + (tau - p) / tau
        dloss_dp = -1.0 / tau
    return loss, dloss_dp * dp_dq
