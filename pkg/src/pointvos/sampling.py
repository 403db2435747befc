"""Point and frame sampling for the annotation pipeline.

Points live in continuous image coordinates: pixel ``(i, j)`` covers the
unit square ``[i, i+1) x [j, j+1)`` and has its center at ``(i+0.5, j+0.5)``.
Samplers emit pixel-center points; serialization stores the integer pixel
indices and deserialization restores the centers.  Pairwise distances
between pixel-center points equal the distances between their integer
pixel coordinates, so all distance constraints are computed in exact
integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .masks import as_mask, as_probability_map, distance_transform
from .rng import RNG_ALGORITHM, Xoshiro256

FOREGROUND = "foreground"
BACKGROUND = "background"
UNCERTAIN = "uncertain"


@dataclass(frozen=True, order=True)
class Point:
    x: float
    y: float

    @classmethod
    def from_pixel(cls, col: int, row: int) -> "Point":
        return cls(col + 0.5, row + 0.5)

    @property
    def col(self) -> int:
        return int(math.floor(self.x))

    @property
    def row(self) -> int:
        return int(math.floor(self.y))

    def pixel(self) -> tuple[int, int]:
        return (self.col, self.row)


@dataclass(frozen=True)
class RegionPartition:
    """Disjoint, exhaustive split of a frame into FG / BG / uncertain."""

    foreground_region: np.ndarray
    background_region: np.ndarray
    uncertain_region: np.ndarray


@dataclass(frozen=True)
class SamplerConfig:
    d: float = 20.0
    n_fg: int = 7
    n_bg: int = 10
    n_unc: int = 3
    k_frames: int = 10
    hi_threshold: float = 0.8
    lo_threshold: float = 0.2
    rng_seed: int = 0
    # Enforce the min-distance constraint jointly across FG, BG and
    # uncertain candidates of a frame (strict reading); False relaxes it
    # to per-type.
    joint_distance: bool = True

    def __post_init__(self):
        if not (0.0 <= self.lo_threshold < self.hi_threshold <= 1.0):
            raise ValueError(
                f"thresholds must satisfy 0 <= lo < hi <= 1, got lo={self.lo_threshold} hi={self.hi_threshold}"
            )
        if min(self.n_fg, self.n_bg, self.n_unc) < 0 or self.d < 0 or self.k_frames < 1:
            raise ValueError("counts and distance must be non-negative, k_frames >= 1")

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "n_fg": self.n_fg,
            "n_bg": self.n_bg,
            "n_unc": self.n_unc,
            "k_frames": self.k_frames,
            "hi_threshold": self.hi_threshold,
            "lo_threshold": self.lo_threshold,
            "rng_seed": self.rng_seed,
            "joint_distance": self.joint_distance,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SamplerConfig":
        return cls(**obj)


@dataclass(frozen=True)
class Candidate:
    frame: int
    point: Point
    proposed_label: str


@dataclass(frozen=True)
class CandidateSet:
    """Sampled point candidates for one object, awaiting human verdicts."""

    object_id: str
    frames: tuple[int, ...]
    candidates: tuple[Candidate, ...]
    config: SamplerConfig
    video_id: str = ""

    def per_frame(self) -> dict[int, list[Candidate]]:
        by_frame: dict[int, list[Candidate]] = {f: [] for f in self.frames}
        for c in self.candidates:
            by_frame.setdefault(c.frame, []).append(c)
        return by_frame

    def to_json(self) -> dict:
        return {
            "schema": "pv-candidates/1",
            "video_id": self.video_id,
            "object_id": self.object_id,
            "rng_algorithm": RNG_ALGORITHM,
            "config": self.config.to_json(),
            "frames": list(self.frames),
            "candidates": [
                {"frame": c.frame, "x": c.point.col, "y": c.point.row, "proposed_label": c.proposed_label}
                for c in self.candidates
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CandidateSet":
        if obj.get("schema") != "pv-candidates/1":
            raise ValueError(f"unsupported candidate schema: {obj.get('schema')!r}")
        return cls(
            object_id=obj["object_id"],
            video_id=obj.get("video_id", ""),
            frames=tuple(obj["frames"]),
            candidates=tuple(
                Candidate(c["frame"], Point.from_pixel(c["x"], c["y"]), c["proposed_label"])
                for c in obj["candidates"]
            ),
            config=SamplerConfig.from_json(obj["config"]),
        )


def sample_random_min_dist(
    region,
    n: int,
    d: float,
    seed: int = 0,
    *,
    avoid: tuple[Point, ...] = (),
    rng: Xoshiro256 | None = None,
) -> list[Point]:
    """Uniform points on a region's foreground, pairwise >= d apart.

    Rejection sampling with a budget of 100*n uniform draws over the region
    pixels: a draw is accepted iff it clears d against every previously
    accepted point (and every `avoid` point), stopping as soon as n points
    are accepted.  When the constraint cannot be met the maximum number
    found within the budget is returned.  Deterministic for a fixed seed.
    """
    m = as_mask(region)
    if n < 0:
        raise ValueError("n must be >= 0")
    if d < 0:
        raise ValueError("d must be >= 0")
    ys, xs = np.nonzero(m)
    npix = xs.size
    if npix == 0 or n == 0:
        return []
    gen = rng if rng is not None else Xoshiro256(seed)
    d2 = float(d) * float(d)
    accepted = [p.pixel() for p in avoid]
    out: list[tuple[int, int]] = []
    budget = 100 * n
    chunk_size = max(64, 4 * n)
    xs64 = xs.astype(np.int64)
    ys64 = ys.astype(np.int64)
    while budget > 0 and len(out) < n:
        size = min(budget, chunk_size)
        budget -= size
        idxs = gen.integers_below(npix, size)
        cx = xs64[idxs]
        cy = ys64[idxs]
        alive = np.ones(size, dtype=bool)
        for ax, ay in accepted:
            alive &= (cx - ax) ** 2 + (cy - ay) ** 2 >= d2
        alive_list = alive.tolist()
        cx_list = cx.tolist()
        cy_list = cy.tolist()
        for i in range(size):
            if not alive_list[i]:
                continue
            x, y = cx_list[i], cy_list[i]
            accepted.append((x, y))
            out.append((x, y))
            if len(out) == n:
                break
            if d2 > 0:
                still = ((cx - x) ** 2 + (cy - y) ** 2 >= d2) & alive
                alive_list = still.tolist()
                alive = still
    return [Point.from_pixel(x, y) for x, y in out]


def mask_center(mask) -> Point:
    """The foreground pixel deepest inside the mask (distance-transform
    argmax), ties broken by smallest (y, x)."""
    m = as_mask(mask)
    if not m.any():
        raise ValueError("mask_center of an empty mask")
    dt = distance_transform(m)
    idx = int(np.argmax(dt))
    y, x = divmod(idx, m.shape[1])
    return Point.from_pixel(x, y)


def sample_fps(region, n: int) -> list[Point]:
    """Farthest-point sampling seeded at the mask center.

    Each subsequent point is the region pixel maximizing the minimum
    distance to everything already selected, ties by smallest (y, x).
    Returns min(n, region pixel count) points.
    """
    m = as_mask(region)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not m.any():
        raise ValueError("farthest-point sampling on an empty region")
    ys, xs = np.nonzero(m)
    k = min(n, xs.size)
    center = mask_center(m)
    cx, cy = center.pixel()
    px = xs.astype(np.int64)
    py = ys.astype(np.int64)
    min_d2 = (px - cx) ** 2 + (py - cy) ** 2
    chosen = [(cx, cy)]
    while len(chosen) < k:
        i = int(np.argmax(min_d2))
        x, y = int(px[i]), int(py[i])
        chosen.append((x, y))
        np.minimum(min_d2, (px - x) ** 2 + (py - y) ** 2, out=min_d2)
    return [Point.from_pixel(x, y) for x, y in chosen]


def partition_probability(pmap, lo: float, hi: float) -> RegionPartition:
    """Threshold a probability map into likely-foreground (p >= hi),
    likely-background (p <= lo) and the uncertain remainder."""
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"thresholds must satisfy 0 <= lo < hi <= 1, got lo={lo} hi={hi}")
    p = as_probability_map(pmap)
    fg = p >= hi
    bg = p <= lo
    return RegionPartition(fg, bg, ~(fg | bg))


def subsample_frames_even(t_total: int, k: int) -> list[int]:
    """Evenly spaced frame indices, always including first and last.

    For k < t_total, index i maps to round(i*(t_total-1)/(k-1)); k == 1
    degenerates to the first frame.
    """
    if t_total < 1 or k < 1:
        raise ValueError("t_total and k must be >= 1")
    if k >= t_total:
        return list(range(t_total))
    if k == 1:
        return [0]
    num = 2 * (t_total - 1)
    den = 2 * (k - 1)
    return [(i * num + (k - 1)) // den for i in range(k)]


def subsample_frames_random(t_total: int, k: int, seed: int = 0) -> list[int]:
    """min(k, t_total) distinct frame indices, uniform without replacement,
    sorted ascending; deterministic per seed."""
    if t_total < 1 or k < 1:
        raise ValueError("t_total and k must be >= 1")
    if k >= t_total:
        return list(range(t_total))
    gen = Xoshiro256(seed)
    return sorted(gen.sample_without_replacement(t_total, k))


def generate_candidates(maps, cfg: SamplerConfig, object_id: str = "object", video_id: str = "") -> CandidateSet:
    """Sample verification candidates from per-frame probability maps.

    Frames are evenly sub-sampled to cfg.k_frames.  Per retained frame the
    map is partitioned and up to n_fg / n_bg / n_unc candidates are drawn
    from the FG / BG / uncertain regions; with cfg.joint_distance the
    distance constraint is enforced across all of the frame's candidates
    (FG first, then BG, then uncertain against the union).
    """
    maps = list(maps)
    if not maps:
        raise ValueError("need at least one probability map")
    retained = subsample_frames_even(len(maps), cfg.k_frames)
    gen = Xoshiro256(cfg.rng_seed)
    candidates: list[Candidate] = []
    for f in retained:
        part = partition_probability(maps[f], cfg.lo_threshold, cfg.hi_threshold)
        taken: list[Point] = []
        for region, count, label in (
            (part.foreground_region, cfg.n_fg, FOREGROUND),
            (part.background_region, cfg.n_bg, BACKGROUND),
            (part.uncertain_region, cfg.n_unc, UNCERTAIN),
        ):
            avoid = tuple(taken) if cfg.joint_distance else ()
            pts = sample_random_min_dist(region, count, cfg.d, rng=gen, avoid=avoid)
            taken.extend(pts)
            candidates.extend(Candidate(f, p, label) for p in pts)
    return CandidateSet(
        object_id=object_id,
        video_id=video_id,
        frames=tuple(retained),
        candidates=tuple(candidates),
        config=cfg,
    )


def simulate_point_annotations(
    gt,
    n_points: int = 10,
    d: float = 20.0,
    k_frames: int = 10,
    strategy: str = "random",
    seed: int = 0,
    background_id: str = "background",
):
    """Build sparse point annotations from dense ground-truth masks.

    `gt` maps object_id -> {frame_index: BinaryMask}.  Frames are evenly
    sub-sampled to k_frames; per retained frame each object contributes
    n_points positive points from its mask and the common background
    (complement of all object masks) contributes n_points negative points,
    returned on a separate annotation under `background_id`.  Strategy is
    "random" (min-distance rejection sampling) or "fps".

    Returns a list of ObjectAnnotation, background last.
    """
    from .dataset import ObjectAnnotation, PointAnnotation, ReferenceInit

    if not gt:
        raise ValueError("no ground-truth objects given")
    if strategy not in ("random", "fps"):
        raise ValueError(f"unknown strategy {strategy!r}")
    object_ids = sorted(gt)
    all_frames = sorted({f for masks in gt.values() for f in masks})
    if not all_frames:
        raise ValueError("ground truth contains no frames")
    retained = [all_frames[i] for i in subsample_frames_even(len(all_frames), k_frames)]
    gen = Xoshiro256(seed)

    def draw(region, rng):
        if not region.any():
            return []
        if strategy == "fps":
            return sample_fps(region, n_points)
        return sample_random_min_dist(region, n_points, d, rng=rng)

    points_by_object: dict[str, list[PointAnnotation]] = {oid: [] for oid in object_ids}
    background_points: list[PointAnnotation] = []
    for frame in retained:
        union = None
        for oid in object_ids:
            mask = gt[oid].get(frame)
            if mask is None:
                continue
            m = as_mask(mask)
            union = m.copy() if union is None else (union | m)
            for p in draw(m, gen):
                points_by_object[oid].append(
                    PointAnnotation(frame=frame, object_id=oid, point=p, label="positive", source="simulated")
                )
        if union is not None:
            for p in draw(~union, gen):
                background_points.append(
                    PointAnnotation(
                        frame=frame, object_id=background_id, point=p, label="negative", source="simulated"
                    )
                )

    annotations = []
    for oid in object_ids:
        pts = points_by_object[oid]
        frames_with_points = sorted({p.frame for p in pts})
        reference = None
        if frames_with_points:
            ref_frame = frames_with_points[0]
            ref_points = tuple(p.point for p in pts if p.frame == ref_frame)
            reference = ReferenceInit(frame=ref_frame, points=ref_points)
        annotations.append(
            ObjectAnnotation(
                object_id=oid,
                annotated_frames=tuple(frames_with_points),
                points=tuple(pts),
                reference_init=reference,
            )
        )
    bg_frames = sorted({p.frame for p in background_points})
    annotations.append(
        ObjectAnnotation(
            object_id=background_id,
            annotated_frames=tuple(bg_frames),
            points=tuple(background_points),
        )
    )
    return annotations
