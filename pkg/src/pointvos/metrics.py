"""Region and boundary metrics plus the benchmark aggregation protocol.

J is intersection-over-union, F the boundary F-measure computed with the
dilation-based contour matching used by the DAVIS tooling, J&F their mean.
Benchmark results aggregate per-object J&F over reference initializations
of 1, 2, 5 and 10 points; seen/unseen datasets aggregate into the G score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .masks import as_mask, boundary, dilate, rle_decode
from .maskio import load_mask_png

INIT_SIZES = (1, 2, 5, 10)


@dataclass(frozen=True)
class FrameScore:
    j: float
    f: float

    @property
    def jf(self) -> float:
        return (self.j + self.f) / 2.0


def default_tolerance(width: int, height: int) -> int:
    """Boundary matching tolerance: 0.8% of the image diagonal, rounded up."""
    return int(math.ceil(0.008 * math.hypot(width, height)))


def jaccard(pred, gt) -> float:
    """|pred & gt| / |pred | gt|; two empty masks count as a perfect 1.0."""
    p = as_mask(pred)
    g = as_mask(gt)
    if p.shape != g.shape:
        raise ValueError(f"mask shapes differ: {p.shape} vs {g.shape}")
    union = np.count_nonzero(p | g)
    if union == 0:
        return 1.0
    return np.count_nonzero(p & g) / union


def boundary_f(pred, gt, tol: int | None = None) -> float:
    """Boundary F-measure under a pixel tolerance.

    Precision is the fraction of predicted boundary pixels within `tol` of
    the ground-truth boundary (computed by dilating the latter), recall the
    mirror image.  Empty-vs-empty boundaries score 1, one-sided empties 0.
    `tol` defaults to 0.8% of the image diagonal.
    """
    p = as_mask(pred)
    g = as_mask(gt)
    if p.shape != g.shape:
        raise ValueError(f"mask shapes differ: {p.shape} vs {g.shape}")
    if tol is None:
        tol = default_tolerance(p.shape[1], p.shape[0])
    if tol < 0:
        raise ValueError("tolerance must be >= 0")
    pb = boundary(p)
    gb = boundary(g)
    n_pred = np.count_nonzero(pb)
    n_gt = np.count_nonzero(gb)
    if n_pred == 0 and n_gt == 0:
        return 1.0
    if n_pred == 0 or n_gt == 0:
        return 0.0
    precision = np.count_nonzero(pb & dilate(gb, tol)) / n_pred
    recall = np.count_nonzero(gb & dilate(pb, tol)) / n_gt
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def evaluate_object(preds, gts, tol: int | None = None) -> FrameScore:
    """Average J and F over an object's evaluation frames.

    `preds` and `gts` map frame index -> mask and must cover the same
    frames (the benchmark uses up to 3 per object).
    """
    if set(preds) != set(gts):
        missing = sorted(set(gts) - set(preds))
        extra = sorted(set(preds) - set(gts))
        raise ValueError(f"evaluation frame sets differ (missing {missing}, unexpected {extra})")
    if not gts:
        raise ValueError("need at least one evaluation frame")
    js = []
    fs = []
    for frame in sorted(gts):
        js.append(jaccard(preds[frame], gts[frame]))
        fs.append(boundary_f(preds[frame], gts[frame], tol))
    return FrameScore(j=float(np.mean(js)), f=float(np.mean(fs)))


@dataclass(frozen=True)
class BenchmarkReport:
    """Per-initialization mean J&F (percent) and their overall mean."""

    per_init: dict[int, float]

    @property
    def mean(self) -> float:
        return sum(self.per_init.values()) / len(self.per_init)

    def render(self) -> str:
        cells = [f"Mean {self.mean:.1f}"]
        cells += [f"{k}-point {self.per_init[k]:.1f}" for k in sorted(self.per_init)]
        return " | ".join(cells)

    def to_json(self) -> dict:
        return {
            "mean": self.mean,
            "per_init": {str(k): v for k, v in sorted(self.per_init.items())},
            "rendered": self.render(),
        }


def benchmark_report(per_init_scores, required=INIT_SIZES) -> BenchmarkReport:
    """Assemble the per-initialization report; Mean averages the unrounded
    per-init values."""
    scores = dict(per_init_scores)
    missing = [k for k in required if k not in scores]
    if missing:
        raise ValueError(f"missing init sizes: {missing}")
    return BenchmarkReport(per_init={int(k): float(v) for k, v in scores.items()})


@dataclass(frozen=True)
class SplitReport:
    """Seen/unseen component means and their overall mean G."""

    j_seen: float
    f_seen: float
    j_unseen: float
    f_unseen: float

    @property
    def g(self) -> float:
        return (self.j_seen + self.f_seen + self.j_unseen + self.f_unseen) / 4.0

    def render(self) -> str:
        return (
            f"G {self.g:.1f} | J_seen {self.j_seen:.1f} | F_seen {self.f_seen:.1f}"
            f" | J_unseen {self.j_unseen:.1f} | F_unseen {self.f_unseen:.1f}"
        )

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "j_seen": self.j_seen,
            "f_seen": self.f_seen,
            "j_unseen": self.j_unseen,
            "f_unseen": self.f_unseen,
            "rendered": self.render(),
        }


def split_report(scores, labels) -> SplitReport:
    """Aggregate per-object (J, F) scores into the seen/unseen G report.

    `scores` maps object key -> (j, f); `labels` maps object key ->
    "seen" or "unseen".  Every scored object needs a label and both splits
    must be populated.
    """
    groups: dict[str, list[tuple[float, float]]] = {"seen": [], "unseen": []}
    for key, jf in scores.items():
        if key not in labels:
            raise ValueError(f"object {key!r} has no seen/unseen label")
        label = labels[key]
        if label not in groups:
            raise ValueError(f"object {key!r}: bad split label {label!r}")
        groups[label].append((float(jf[0]), float(jf[1])))
    for name, members in groups.items():
        if not members:
            raise ValueError(f"no objects labeled {name!r}; G is undefined")
    return SplitReport(
        j_seen=float(np.mean([j for j, _ in groups["seen"]])),
        f_seen=float(np.mean([f for _, f in groups["seen"]])),
        j_unseen=float(np.mean([j for j, _ in groups["unseen"]])),
        f_unseen=float(np.mean([f for _, f in groups["unseen"]])),
    )


def sparse_dense_correlation(dense_scores, sparse_scores) -> float:
    """Spearman rank correlation between two paired score lists (average
    ranks on ties)."""
    a = np.asarray(dense_scores, dtype=np.float64)
    b = np.asarray(sparse_scores, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise ValueError(f"score lists must be 1-D and equal length, got {a.shape} vs {b.shape}")
    if a.size < 3:
        raise ValueError("need at least 3 paired scores")
    if np.ptp(a) == 0.0 or np.ptp(b) == 0.0:
        raise ValueError("rank correlation is undefined for constant scores")
    rho, _ = stats.spearmanr(a, b)
    return float(rho)


def evaluate_predictions(pred_root, videos, init: int, tol: int | None = None):
    """Score one initialization's predictions against dataset GT masks.

    Predictions live at <pred_root>/<init>/<video_id>/<object_id>/<frame
    %05d>.png; ground truth comes from each object's inlined eval_masks.
    Objects without eval masks are skipped.  Returns {(video_id,
    object_id): FrameScore}.
    """
    from pathlib import Path

    root = Path(pred_root) / str(init)
    results: dict[tuple[str, str], FrameScore] = {}
    for video in videos:
        for obj in video.objects:
            if not obj.eval_masks:
                continue
            preds = {}
            gts = {}
            for frame, rle in obj.eval_masks.items():
                path = root / video.video_id / obj.object_id / f"{frame:05d}.png"
                if not path.is_file():
                    raise FileNotFoundError(f"missing prediction mask: {path}")
                preds[frame] = load_mask_png(path)
                gts[frame] = rle_decode(rle)
            results[(video.video_id, obj.object_id)] = evaluate_object(preds, gts, tol)
    return results


def run_benchmark(pred_root, videos, inits=INIT_SIZES, tol: int | None = None) -> BenchmarkReport:
    """Mean J&F per initialization (percent, averaged per object first)."""
    per_init = {}
    for init in inits:
        scores = evaluate_predictions(pred_root, videos, init, tol)
        if not scores:
            raise ValueError("dataset has no objects with eval masks")
        per_init[init] = 100.0 * float(np.mean([s.jf for s in scores.values()]))
    return benchmark_report(per_init, required=tuple(inits))
