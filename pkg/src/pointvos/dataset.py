"""Dataset model: point annotations, videos, split-construction rules,
statistics, and the versioned JSON serialization (`pv-schema/1`).

A dataset file is a single JSON object:

    {
      "schema": "pv-schema/1",
      "videos": [
        {
          "video_id": str,
          "frame_count": int,
          "resolution": [width, height],
          "caption": str,                # optional
          "objects": [
            {
              "object_id": str,
              "noun": {"text": str, "start": int, "end": int},   # optional
              "seen": bool,                                      # optional
              "annotated_frames": [int, ...],
              "reference_init": {"frame": int,
                                 "points": [{"x": int, "y": int}, ...]},  # optional
              "points": [{"frame": int, "x": int, "y": int,
                          "label": "positive|negative|ambiguous",
                          "source": "simulated|verified|rejected-candidate"}],
              "eval_masks": {"<frame>": {"width": int, "height": int,
                                         "counts": [int, ...]}}  # optional
            }
          ]
        }
      ]
    }

Points are stored as integer pixel indices and interpreted at pixel
centers.  Unknown fields are rejected; every load error names the exact
JSON path of the offending value.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field, replace

from .masks import Rle
from .sampling import Point, subsample_frames_even

SCHEMA_VERSION = "pv-schema/1"

POINT_LABELS = ("positive", "negative", "ambiguous")
POINT_SOURCES = ("simulated", "verified", "rejected-candidate")


class DatasetError(ValueError):
    """Schema or bounds violation in a dataset file, with the JSON path."""


@dataclass(frozen=True)
class PointAnnotation:
    frame: int
    object_id: str
    point: Point
    label: str
    source: str

    def __post_init__(self):
        if self.label not in POINT_LABELS:
            raise ValueError(f"bad point label {self.label!r}")
        if self.source not in POINT_SOURCES:
            raise ValueError(f"bad point source {self.source!r}")


@dataclass(frozen=True)
class ReferenceInit:
    """The frame and positive points used to initialize inference."""

    frame: int
    points: tuple[Point, ...]

    def __post_init__(self):
        if not self.points:
            raise ValueError("reference init needs at least one point")


@dataclass(frozen=True)
class NounSpan:
    """A noun inside the video caption, by character offsets."""

    text: str
    start: int
    end: int

    def __post_init__(self):
        if not (0 <= self.start < self.end):
            raise ValueError(f"bad noun span offsets [{self.start}, {self.end})")


@dataclass(frozen=True)
class ObjectAnnotation:
    object_id: str
    annotated_frames: tuple[int, ...] = ()
    points: tuple[PointAnnotation, ...] = ()
    reference_init: ReferenceInit | None = None
    noun: NounSpan | None = None
    seen: bool | None = None
    eval_masks: dict[int, Rle] = field(default_factory=dict)

    def __post_init__(self):
        frames = set(self.annotated_frames)
        if list(self.annotated_frames) != sorted(frames):
            raise ValueError(f"object {self.object_id!r}: annotated_frames must be sorted and distinct")
        for p in self.points:
            if p.frame not in frames:
                raise ValueError(
                    f"object {self.object_id!r}: point on frame {p.frame} outside annotated_frames"
                )
            if p.object_id != self.object_id:
                raise ValueError(
                    f"object {self.object_id!r}: contains a point owned by {p.object_id!r}"
                )
        if self.reference_init is not None and self.reference_init.frame not in frames:
            raise ValueError(
                f"object {self.object_id!r}: reference frame {self.reference_init.frame} not annotated"
            )

    def points_on(self, frame: int, label: str | None = None) -> list[PointAnnotation]:
        return [p for p in self.points if p.frame == frame and (label is None or p.label == label)]

    def label_count(self, frame: int, label: str) -> int:
        return sum(1 for p in self.points if p.frame == frame and p.label == label)


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    frame_count: int
    resolution: tuple[int, int]
    objects: tuple[ObjectAnnotation, ...] = ()
    caption: str | None = None

    def __post_init__(self):
        if self.frame_count < 1:
            raise ValueError(f"video {self.video_id!r}: frame_count must be >= 1")
        w, h = self.resolution
        if w < 1 or h < 1:
            raise ValueError(f"video {self.video_id!r}: bad resolution {self.resolution}")
        ids = [o.object_id for o in self.objects]
        if len(ids) != len(set(ids)):
            raise ValueError(f"video {self.video_id!r}: duplicate object ids")
        for obj in self.objects:
            for f in obj.annotated_frames:
                if not (0 <= f < self.frame_count):
                    raise ValueError(
                        f"video {self.video_id!r} object {obj.object_id!r}: frame {f} out of range"
                    )
            for p in obj.points:
                if not (0 <= p.point.x < w and 0 <= p.point.y < h):
                    raise ValueError(
                        f"video {self.video_id!r} object {obj.object_id!r}: point "
                        f"({p.point.x}, {p.point.y}) outside {w}x{h}"
                    )
            if obj.noun is not None:
                if self.caption is None:
                    raise ValueError(
                        f"video {self.video_id!r} object {obj.object_id!r}: noun span without caption"
                    )
                if obj.noun.end > len(self.caption):
                    raise ValueError(
                        f"video {self.video_id!r} object {obj.object_id!r}: noun span exceeds caption"
                    )
                if self.caption[obj.noun.start : obj.noun.end] != obj.noun.text:
                    raise ValueError(
                        f"video {self.video_id!r} object {obj.object_id!r}: noun text does not match caption span"
                    )


@dataclass(frozen=True)
class TraceSegment:
    """A mouse-trace polyline localizing one object on one key-frame."""

    object_id: str
    frame: int
    trace: tuple[Point, ...]

    def __post_init__(self):
        if not self.trace:
            raise ValueError("trace segment needs at least one point")

    def bbox_area(self) -> float:
        xs = [p.x for p in self.trace]
        ys = [p.y for p in self.trace]
        return (max(xs) - min(xs)) * (max(ys) - min(ys))

    def hull_area(self) -> float:
        coords = sorted({(p.x, p.y) for p in self.trace})
        if len(coords) < 3:
            return 0.0
        # monotone-chain hull, then the shoelace formula
        def half(points):
            chain = []
            for pt in points:
                while len(chain) >= 2:
                    (x1, y1), (x2, y2) = chain[-2], chain[-1]
                    if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) > 0:
                        break
                    chain.pop()
                chain.append(pt)
            return chain

        lower = half(coords)
        upper = half(coords[::-1])
        hull = lower[:-1] + upper[:-1]
        if len(hull) < 3:
            return 0.0
        area2 = 0.0
        for (x1, y1), (x2, y2) in zip(hull, hull[1:] + hull[:1]):
            area2 += x1 * y2 - x2 * y1
        return abs(area2) / 2.0


@dataclass(frozen=True)
class DatasetStats:
    video_count: int
    object_count: int
    # per object, the number of frames it is annotated in, summed
    annotation_count: int
    positive_points: int
    negative_points: int
    ambiguous_points: int
    # videos binned by their number of frames carrying >= 1 positive point
    annotated_frames_per_video: dict[int, int]
    # objects binned by their total point count
    points_per_object: dict[int, int]

    def to_json(self) -> dict:
        return {
            "video_count": self.video_count,
            "object_count": self.object_count,
            "annotation_count": self.annotation_count,
            "positive_points": self.positive_points,
            "negative_points": self.negative_points,
            "ambiguous_points": self.ambiguous_points,
            "annotated_frames_per_video": {str(k): v for k, v in sorted(self.annotated_frames_per_video.items())},
            "points_per_object": {str(k): v for k, v in sorted(self.points_per_object.items())},
        }


def select_keyframe(segments, area: str = "bbox") -> TraceSegment:
    """The trace segment covering the largest area, ties by earliest frame.

    `area` picks the measure: "bbox" (axis-aligned bounding box of the
    trace points) or "hull" (convex hull).
    """
    segments = list(segments)
    if not segments:
        raise ValueError("no trace segments given")
    if area not in ("bbox", "hull"):
        raise ValueError(f"unknown area measure {area!r}")
    measure = TraceSegment.bbox_area if area == "bbox" else TraceSegment.hull_area
    return min(segments, key=lambda s: (-measure(s), s.frame))


def select_reference_frame(obj: ObjectAnnotation) -> int | None:
    """Earliest annotated frame with >= 7 positive points, or None.

    Also returns None when no strictly later annotated frame carries at
    least 3 positive and 1 negative point, since such an object cannot be
    evaluated.
    """
    reference = None
    for f in obj.annotated_frames:
        if obj.label_count(f, "positive") >= 7:
            reference = f
            break
    if reference is None:
        return None
    for f in obj.annotated_frames:
        if f > reference and obj.label_count(f, "positive") >= 3 and obj.label_count(f, "negative") >= 1:
            return reference
    return None


def select_eval_frames(obj: ObjectAnnotation, trace_frame: int, reference: int) -> list[int] | None:
    """Up to 3 evaluation frames after the reference, always including the
    trace frame.

    Evenly sub-samples 3 of the object's post-reference annotated frames;
    if the trace frame is not among them, the sampled frame temporally
    closest to it is replaced by the trace frame.  Returns None when the
    trace frame does not come after the reference.
    """
    if trace_frame <= reference:
        return None
    later = [f for f in obj.annotated_frames if f > reference]
    sampled = [later[i] for i in subsample_frames_even(len(later), 3)] if later else []
    if trace_frame in sampled:
        return sampled
    if len(sampled) == 3:
        # adding the trace frame would exceed 3; drop its nearest neighbor
        drop = min(sampled, key=lambda f: (abs(f - trace_frame), f))
        sampled = [f for f in sampled if f != drop]
    return sorted(sampled + [trace_frame])


def build_validation_object(
    obj: ObjectAnnotation, trace_frame: int
) -> ObjectAnnotation | None:
    """Apply the validation-split construction rules to one object.

    Selects the reference frame, drops annotated frames before it, sets
    reference_init from the reference frame's positive points, and keeps
    only the selected evaluation frames after it.  Returns None when the
    object is rejected by any rule.
    """
    reference = select_reference_frame(obj)
    if reference is None:
        return None
    eval_frames = select_eval_frames(obj, trace_frame, reference)
    if eval_frames is None:
        return None
    frames = tuple(sorted({reference, *eval_frames}))
    keep = set(frames)
    points = tuple(p for p in obj.points if p.frame in keep)
    reference_points = tuple(p.point for p in obj.points if p.frame == reference and p.label == "positive")
    return replace(
        obj,
        annotated_frames=frames,
        points=points,
        reference_init=ReferenceInit(frame=reference, points=reference_points),
        eval_masks={f: rle for f, rle in obj.eval_masks.items() if f in keep},
    )


def dataset_stats(videos) -> DatasetStats:
    videos = list(videos)
    object_count = 0
    annotation_count = 0
    labels = Counter()
    frame_hist = Counter()
    point_hist = Counter()
    for v in videos:
        positive_frames = set()
        for obj in v.objects:
            object_count += 1
            annotation_count += len(obj.annotated_frames)
            point_hist[len(obj.points)] += 1
            for p in obj.points:
                labels[p.label] += 1
                if p.label == "positive":
                    positive_frames.add(p.frame)
        frame_hist[len(positive_frames)] += 1
    return DatasetStats(
        video_count=len(videos),
        object_count=object_count,
        annotation_count=annotation_count,
        positive_points=labels["positive"],
        negative_points=labels["negative"],
        ambiguous_points=labels["ambiguous"],
        annotated_frames_per_video=dict(frame_hist),
        points_per_object=dict(point_hist),
    )


# ---------------------------------------------------------------------------
# serialization

def _require(obj, path: str, required: tuple, optional: tuple = ()) -> None:
    if not isinstance(obj, dict):
        raise DatasetError(f"{path}: expected an object, got {type(obj).__name__}")
    for key in obj:
        if key not in required and key not in optional:
            raise DatasetError(f"{path}.{key}: unknown field")
    for key in required:
        if key not in obj:
            raise DatasetError(f"{path}.{key}: missing required field")


def _typed(value, kind, path: str):
    if kind is int and isinstance(value, bool):
        raise DatasetError(f"{path}: expected int, got bool")
    if not isinstance(value, kind):
        raise DatasetError(f"{path}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def _point_xy(obj: dict, path: str, width: int, height: int) -> Point:
    """Bounds-check the x/y members of an already shape-validated dict."""
    x = _typed(obj["x"], int, f"{path}.x")
    y = _typed(obj["y"], int, f"{path}.y")
    if not (0 <= x < width):
        raise DatasetError(f"{path}.x: {x} out of bounds for width {width}")
    if not (0 <= y < height):
        raise DatasetError(f"{path}.y: {y} out of bounds for height {height}")
    return Point.from_pixel(x, y)


def _object_from_json(obj: dict, path: str, video: dict, width: int, height: int) -> ObjectAnnotation:
    _require(
        obj,
        path,
        ("object_id", "annotated_frames", "points"),
        ("noun", "seen", "reference_init", "eval_masks"),
    )
    object_id = _typed(obj["object_id"], str, f"{path}.object_id")
    frame_count = video["frame_count"]
    frames = []
    for i, f in enumerate(_typed(obj["annotated_frames"], list, f"{path}.annotated_frames")):
        fp = f"{path}.annotated_frames[{i}]"
        f = _typed(f, int, fp)
        if not (0 <= f < frame_count):
            raise DatasetError(f"{fp}: frame {f} out of range for frame_count {frame_count}")
        frames.append(f)
    points = []
    for i, p in enumerate(_typed(obj["points"], list, f"{path}.points")):
        pp = f"{path}.points[{i}]"
        _require(p, pp, ("frame", "x", "y", "label", "source"))
        frame = _typed(p["frame"], int, f"{pp}.frame")
        label = _typed(p["label"], str, f"{pp}.label")
        source = _typed(p["source"], str, f"{pp}.source")
        if label not in POINT_LABELS:
            raise DatasetError(f"{pp}.label: {label!r} not one of {list(POINT_LABELS)}")
        if source not in POINT_SOURCES:
            raise DatasetError(f"{pp}.source: {source!r} not one of {list(POINT_SOURCES)}")
        point = _point_xy(p, pp, width, height)
        points.append(PointAnnotation(frame=frame, object_id=object_id, point=point, label=label, source=source))
    noun = None
    if "noun" in obj:
        np_ = f"{path}.noun"
        _require(obj["noun"], np_, ("text", "start", "end"))
        try:
            noun = NounSpan(
                _typed(obj["noun"]["text"], str, f"{np_}.text"),
                _typed(obj["noun"]["start"], int, f"{np_}.start"),
                _typed(obj["noun"]["end"], int, f"{np_}.end"),
            )
        except ValueError as e:
            raise DatasetError(f"{np_}: {e}") from None
    reference = None
    if "reference_init" in obj:
        rp = f"{path}.reference_init"
        _require(obj["reference_init"], rp, ("frame", "points"))
        ref_frame = _typed(obj["reference_init"]["frame"], int, f"{rp}.frame")
        ref_points = []
        for i, q in enumerate(_typed(obj["reference_init"]["points"], list, f"{rp}.points")):
            qp = f"{rp}.points[{i}]"
            _require(q, qp, ("x", "y"))
            ref_points.append(_point_xy(q, qp, width, height))
        if not ref_points:
            raise DatasetError(f"{rp}.points: must not be empty")
        reference = ReferenceInit(frame=ref_frame, points=tuple(ref_points))
    eval_masks: dict[int, Rle] = {}
    if "eval_masks" in obj:
        for key, value in _typed(obj["eval_masks"], dict, f"{path}.eval_masks").items():
            mp = f"{path}.eval_masks[{key!r}]"
            if not key.isdigit():
                raise DatasetError(f"{mp}: frame key must be a decimal string")
            frame = int(key)
            if not (0 <= frame < frame_count):
                raise DatasetError(f"{mp}: frame {frame} out of range for frame_count {frame_count}")
            _require(value, mp, ("width", "height", "counts"))
            try:
                eval_masks[frame] = Rle(
                    width=_typed(value["width"], int, f"{mp}.width"),
                    height=_typed(value["height"], int, f"{mp}.height"),
                    counts=tuple(_typed(c, int, f"{mp}.counts[{i}]") for i, c in enumerate(value["counts"])),
                )
            except DatasetError:
                raise
            except ValueError as e:
                raise DatasetError(f"{mp}: {e}") from None
    seen = None
    if "seen" in obj:
        seen = _typed(obj["seen"], bool, f"{path}.seen")
    try:
        return ObjectAnnotation(
            object_id=object_id,
            annotated_frames=tuple(frames),
            points=tuple(points),
            reference_init=reference,
            noun=noun,
            seen=seen,
            eval_masks=eval_masks,
        )
    except ValueError as e:
        raise DatasetError(f"{path}: {e}") from None


def _video_from_json(video: dict, path: str) -> VideoRecord:
    _require(
        video,
        path,
        ("video_id", "frame_count", "resolution", "objects"),
        ("caption",),
    )
    video_id = _typed(video["video_id"], str, f"{path}.video_id")
    frame_count = _typed(video["frame_count"], int, f"{path}.frame_count")
    res = _typed(video["resolution"], list, f"{path}.resolution")
    if len(res) != 2 or not all(isinstance(v, int) and not isinstance(v, bool) for v in res):
        raise DatasetError(f"{path}.resolution: expected [width, height] integers")
    width, height = res
    objects = tuple(
        _object_from_json(o, f"{path}.objects[{i}]", video, width, height)
        for i, o in enumerate(_typed(video["objects"], list, f"{path}.objects"))
    )
    try:
        return VideoRecord(
            video_id=video_id,
            frame_count=frame_count,
            resolution=(width, height),
            objects=objects,
            caption=video.get("caption"),
        )
    except ValueError as e:
        raise DatasetError(f"{path}: {e}") from None


def dataset_from_json(doc) -> list[VideoRecord]:
    _require(doc, "$", ("schema", "videos"))
    if doc["schema"] != SCHEMA_VERSION:
        raise DatasetError(f"$.schema: expected {SCHEMA_VERSION!r}, got {doc['schema']!r}")
    videos = _typed(doc["videos"], list, "$.videos")
    return [_video_from_json(v, f"$.videos[{i}]") for i, v in enumerate(videos)]


def dataset_to_json(videos) -> dict:
    out_videos = []
    for v in videos:
        vo = {
            "video_id": v.video_id,
            "frame_count": v.frame_count,
            "resolution": [v.resolution[0], v.resolution[1]],
        }
        if v.caption is not None:
            vo["caption"] = v.caption
        vo["objects"] = []
        for obj in v.objects:
            oo = {"object_id": obj.object_id}
            if obj.noun is not None:
                oo["noun"] = {"text": obj.noun.text, "start": obj.noun.start, "end": obj.noun.end}
            if obj.seen is not None:
                oo["seen"] = obj.seen
            oo["annotated_frames"] = list(obj.annotated_frames)
            if obj.reference_init is not None:
                oo["reference_init"] = {
                    "frame": obj.reference_init.frame,
                    "points": [{"x": p.col, "y": p.row} for p in obj.reference_init.points],
                }
            oo["points"] = [
                {"frame": p.frame, "x": p.point.col, "y": p.point.row, "label": p.label, "source": p.source}
                for p in obj.points
            ]
            if obj.eval_masks:
                oo["eval_masks"] = {
                    str(f): rle.to_json() for f, rle in sorted(obj.eval_masks.items())
                }
            vo["objects"].append(oo)
        out_videos.append(vo)
    return {"schema": SCHEMA_VERSION, "videos": out_videos}


def load_dataset(path) -> list[VideoRecord]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise DatasetError(f"{path}: malformed JSON: {e}") from None
    return dataset_from_json(doc)


def save_dataset(videos, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dataset_to_json(videos), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# narrative-grounding export

@dataclass(frozen=True)
class VngRecord:
    """One grounding sample: a caption with a marked noun and the object's
    per-frame masks."""

    video_id: str
    caption: str
    noun_start: int
    noun_end: int
    masks: dict[int, Rle]


@dataclass(frozen=True)
class VngExport:
    records: tuple[VngRecord, ...]
    skipped: int


def export_vng(videos, mask_source) -> VngExport:
    """Pair caption noun spans with per-frame masks.

    `mask_source` maps (video_id, object_id) -> {frame: RLE}.  Objects
    without a noun span (or videos without a caption) are skipped and
    counted; a noun-bearing object with no masks is an error.
    """
    records = []
    skipped = 0
    for v in videos:
        for obj in v.objects:
            if obj.noun is None or v.caption is None:
                skipped += 1
                continue
            masks = mask_source.get((v.video_id, obj.object_id), {})
            if not masks:
                raise ValueError(f"no masks provided for {v.video_id}/{obj.object_id}")
            records.append(
                VngRecord(
                    video_id=v.video_id,
                    caption=v.caption,
                    noun_start=obj.noun.start,
                    noun_end=obj.noun.end,
                    masks=dict(sorted(masks.items())),
                )
            )
    return VngExport(records=tuple(records), skipped=skipped)


def vng_to_json(export: VngExport) -> dict:
    return {
        "schema": "pv-vng/1",
        "skipped": export.skipped,
        "records": [
            {
                "video_id": r.video_id,
                "caption": r.caption,
                "noun_start": r.noun_start,
                "noun_end": r.noun_end,
                "masks": {str(f): rle.to_json() for f, rle in r.masks.items()},
            }
            for r in export.records
        ],
    }
