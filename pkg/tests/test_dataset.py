import json
import random

import numpy as np
import pytest

from helpers import CAPTION, random_video
from pointvos.dataset import (
    DatasetError,
    NounSpan,
    ObjectAnnotation,
    PointAnnotation,
    ReferenceInit,
    TraceSegment,
    VideoRecord,
    build_validation_object,
    dataset_from_json,
    dataset_stats,
    dataset_to_json,
    export_vng,
    load_dataset,
    save_dataset,
    select_eval_frames,
    select_keyframe,
    select_reference_frame,
    vng_to_json,
)
from pointvos.masks import Rle, rle_encode
from pointvos.sampling import Point


def pt(frame, x, y, object_id="obj", label="positive", source="simulated"):
    return PointAnnotation(
        frame=frame, object_id=object_id, point=Point.from_pixel(x, y), label=label, source=source
    )


def obj_with_counts(per_frame, object_id="obj"):
    """per_frame: {frame: (n_positive, n_negative)} with collision-free x."""
    points = []
    frames = tuple(sorted(per_frame))
    for frame, (n_pos, n_neg) in per_frame.items():
        for i in range(n_pos):
            points.append(pt(frame, i, 0, object_id=object_id))
        for i in range(n_neg):
            points.append(pt(frame, i, 5, object_id=object_id, label="negative"))
    return ObjectAnnotation(object_id=object_id, annotated_frames=frames, points=tuple(points))


# --- model validation --------------------------------------------------------

def test_point_annotation_rejects_bad_enum_values():
    with pytest.raises(ValueError):
        pt(0, 1, 1, label="maybe")
    with pytest.raises(ValueError):
        pt(0, 1, 1, source="guessed")


def test_reference_init_requires_points():
    with pytest.raises(ValueError):
        ReferenceInit(frame=0, points=())


def test_noun_span_offsets():
    NounSpan("car", 6, 9)
    with pytest.raises(ValueError):
        NounSpan("car", 9, 9)
    with pytest.raises(ValueError):
        NounSpan("car", -1, 2)


def test_object_requires_sorted_distinct_frames():
    with pytest.raises(ValueError):
        ObjectAnnotation(object_id="o", annotated_frames=(3, 1))
    with pytest.raises(ValueError):
        ObjectAnnotation(object_id="o", annotated_frames=(1, 1))


def test_object_rejects_stray_points():
    with pytest.raises(ValueError):
        ObjectAnnotation(object_id="o", annotated_frames=(1,), points=(pt(2, 0, 0, object_id="o"),))
    with pytest.raises(ValueError):
        ObjectAnnotation(object_id="o", annotated_frames=(1,), points=(pt(1, 0, 0, object_id="other"),))


def test_object_reference_frame_must_be_annotated():
    with pytest.raises(ValueError):
        ObjectAnnotation(
            object_id="o",
            annotated_frames=(1,),
            reference_init=ReferenceInit(frame=2, points=(Point.from_pixel(0, 0),)),
        )


def test_video_record_validation():
    ok = ObjectAnnotation(object_id="o", annotated_frames=(0,), points=(pt(0, 3, 2, "o"),))
    VideoRecord(video_id="v", frame_count=2, resolution=(4, 4), objects=(ok,))
    with pytest.raises(ValueError):
        VideoRecord(video_id="v", frame_count=0, resolution=(4, 4))
    with pytest.raises(ValueError):
        VideoRecord(video_id="v", frame_count=2, resolution=(0, 4))
    with pytest.raises(ValueError):
        VideoRecord(video_id="v", frame_count=2, resolution=(4, 4), objects=(ok, ok))
    with pytest.raises(ValueError):  # frame out of range
        VideoRecord(video_id="v", frame_count=1, resolution=(4, 4), objects=(
            ObjectAnnotation(object_id="o", annotated_frames=(1,)),
        ))
    with pytest.raises(ValueError):  # point outside resolution
        VideoRecord(video_id="v", frame_count=1, resolution=(3, 3), objects=(
            ObjectAnnotation(object_id="o", annotated_frames=(0,), points=(pt(0, 3, 2, "o"),)),
        ))


def test_video_record_noun_consistency():
    noun = NounSpan("car", CAPTION.index("car"), CAPTION.index("car") + 3)
    good = ObjectAnnotation(object_id="o", annotated_frames=(0,), noun=noun)
    VideoRecord(video_id="v", frame_count=1, resolution=(4, 4), objects=(good,), caption=CAPTION)
    with pytest.raises(ValueError):  # noun without caption
        VideoRecord(video_id="v", frame_count=1, resolution=(4, 4), objects=(good,))
    with pytest.raises(ValueError):  # text does not match the span
        bad = ObjectAnnotation(object_id="o", annotated_frames=(0,), noun=NounSpan("cat", 6, 9))
        VideoRecord(video_id="v", frame_count=1, resolution=(4, 4), objects=(bad,), caption=CAPTION)
    with pytest.raises(ValueError):  # span beyond the caption
        far = ObjectAnnotation(object_id="o", annotated_frames=(0,), noun=NounSpan("x", 500, 501))
        VideoRecord(video_id="v", frame_count=1, resolution=(4, 4), objects=(far,), caption=CAPTION)


# --- trace segments and key-frame selection -----------------------------------

def square_trace(frame, size, object_id="o"):
    pts = (
        Point(0.0, 0.0),
        Point(float(size), 0.0),
        Point(float(size), float(size)),
        Point(0.0, float(size)),
    )
    return TraceSegment(object_id=object_id, frame=frame, trace=pts)


def test_trace_areas():
    seg = square_trace(0, 10)
    assert seg.bbox_area() == 100.0
    assert seg.hull_area() == 100.0
    tri = TraceSegment("o", 0, (Point(0, 0), Point(4, 0), Point(0, 4)))
    assert tri.bbox_area() == 16.0
    assert tri.hull_area() == 8.0
    line = TraceSegment("o", 0, (Point(0, 0), Point(10, 0)))
    assert line.bbox_area() == 0.0
    assert line.hull_area() == 0.0
    with pytest.raises(ValueError):
        TraceSegment("o", 0, ())


def test_select_keyframe_prefers_largest_area():
    segs = [square_trace(3, 10), square_trace(1, 20), square_trace(5, 5)]
    assert select_keyframe(segs).frame == 1


def test_select_keyframe_tie_breaks_earlier_frame():
    segs = [square_trace(4, 10), square_trace(2, 10)]
    assert select_keyframe(segs).frame == 2


def test_select_keyframe_measure_changes_winner():
    solid = square_trace(7, 4)  # bbox 16, hull 16
    sliver = TraceSegment("o", 1, (Point(0, 0), Point(20, 2)))  # bbox 40, hull 0
    assert select_keyframe([solid, sliver], area="bbox").frame == 1
    assert select_keyframe([solid, sliver], area="hull").frame == 7


def test_select_keyframe_rejects_bad_input():
    with pytest.raises(ValueError):
        select_keyframe([])
    with pytest.raises(ValueError):
        select_keyframe([square_trace(0, 1)], area="perimeter")


# --- reference-frame rule ------------------------------------------------------

def test_reference_is_earliest_frame_with_seven_positives():
    obj = obj_with_counts({2: (5, 0), 5: (8, 0), 8: (4, 1), 9: (1, 2)})
    assert select_reference_frame(obj) == 5


def test_reference_requires_seven_positives():
    obj = obj_with_counts({0: (6, 2), 4: (6, 3)})
    assert select_reference_frame(obj) is None


def test_reference_requires_later_continuation():
    # 7 positives only on the last frame: nothing after it to evaluate
    obj = obj_with_counts({0: (2, 1), 9: (7, 1)})
    assert select_reference_frame(obj) is None
    # a later frame exists but lacks a negative point
    obj = obj_with_counts({0: (7, 0), 5: (4, 0)})
    assert select_reference_frame(obj) is None
    # and one with too few positives
    obj = obj_with_counts({0: (7, 0), 5: (2, 3)})
    assert select_reference_frame(obj) is None


def test_reference_continuation_must_be_strictly_later():
    obj = obj_with_counts({3: (7, 1)})
    assert select_reference_frame(obj) is None


# --- evaluation-frame rule -------------------------------------------------------

def test_eval_frames_keep_sampled_when_trace_is_member():
    obj = obj_with_counts({0: (7, 1), 10: (3, 1), 20: (3, 1), 30: (3, 1)})
    assert select_eval_frames(obj, trace_frame=20, reference=0) == [10, 20, 30]


def test_eval_frames_replace_closest_to_trace():
    obj = obj_with_counts({0: (7, 1), 10: (3, 1), 20: (3, 1), 30: (3, 1)})
    assert select_eval_frames(obj, trace_frame=22, reference=0) == [10, 22, 30]


def test_eval_frames_closest_tie_drops_earlier():
    obj = obj_with_counts({0: (7, 1), 10: (3, 1), 20: (3, 1), 30: (3, 1)})
    assert select_eval_frames(obj, trace_frame=25, reference=0) == [10, 25, 30]


def test_eval_frames_reject_trace_at_or_before_reference():
    obj = obj_with_counts({0: (7, 1), 10: (3, 1)})
    assert select_eval_frames(obj, trace_frame=0, reference=0) is None
    assert select_eval_frames(obj, trace_frame=5, reference=7) is None


def test_eval_frames_with_few_later_frames():
    obj = obj_with_counts({0: (7, 1), 12: (3, 1)})
    assert select_eval_frames(obj, trace_frame=15, reference=0) == [12, 15]
    assert select_eval_frames(obj, trace_frame=12, reference=0) == [12]


def test_eval_frames_with_no_later_frames():
    obj = obj_with_counts({0: (7, 1)})
    assert select_eval_frames(obj, trace_frame=9, reference=0) == [9]


def test_eval_frames_subsample_many_later_frames():
    obj = obj_with_counts({0: (7, 1)} | {f: (3, 1) for f in range(10, 20)})
    got = select_eval_frames(obj, trace_frame=14, reference=0)
    # later frames 10..19 evenly subsample to [10, 15, 19]; 15 is closest
    # to the trace frame and gets replaced by it
    assert got == [10, 14, 19]


def test_eval_frames_properties():
    rng = random.Random(0)
    for _ in range(200):
        frames = sorted(rng.sample(range(60), rng.randrange(1, 12)))
        obj = obj_with_counts({f: (3, 1) for f in frames})
        reference = rng.randrange(0, 50)
        trace = rng.randrange(0, 60)
        got = select_eval_frames(obj, trace, reference)
        if trace <= reference:
            assert got is None
            continue
        assert got is not None
        assert len(got) <= 3
        assert trace in got
        assert got == sorted(set(got))
        assert all(f > reference for f in got)


# --- validation-object assembly ---------------------------------------------

def test_build_validation_object_filters_everything():
    per_frame = {0: (2, 0), 2: (7, 0), 6: (3, 1), 10: (3, 1), 14: (3, 1), 18: (3, 1)}
    obj = obj_with_counts(per_frame)
    masks = {
        f: rle_encode(np.eye(4, dtype=bool)) for f in per_frame
    }
    obj = ObjectAnnotation(
        object_id=obj.object_id,
        annotated_frames=obj.annotated_frames,
        points=obj.points,
        eval_masks=masks,
    )
    built = build_validation_object(obj, trace_frame=14)
    assert built is not None
    assert built.reference_init is not None
    assert built.reference_init.frame == 2
    assert len(built.reference_init.points) == 7
    assert built.annotated_frames == (2, 6, 14, 18)
    assert set(built.eval_masks) == {2, 6, 14, 18}
    assert all(p.frame in {2, 6, 14, 18} for p in built.points)


def test_build_validation_object_rejects_unusable_objects():
    assert build_validation_object(obj_with_counts({0: (6, 1), 5: (3, 1)}), 5) is None
    assert build_validation_object(obj_with_counts({0: (7, 1), 5: (3, 1)}), 0) is None


# --- statistics -----------------------------------------------------------------

def test_stats_counts_annotated_frames_per_object():
    objs = tuple(
        obj_with_counts({f: (1, 0) for f in range(10)}, object_id=f"o{i}") for i in range(2)
    )
    video = VideoRecord(video_id="v", frame_count=10, resolution=(32, 32), objects=objs)
    stats = dataset_stats([video])
    assert stats.video_count == 1
    assert stats.object_count == 2
    assert stats.annotation_count == 20
    assert stats.positive_points == 20
    assert stats.annotated_frames_per_video == {10: 1}
    assert stats.points_per_object == {10: 2}


def test_stats_empty_dataset():
    stats = dataset_stats([])
    assert stats.video_count == 0
    assert stats.object_count == 0
    assert stats.annotation_count == 0


def test_stats_label_tallies_and_json():
    obj = ObjectAnnotation(
        object_id="o",
        annotated_frames=(0,),
        points=(
            pt(0, 0, 0, "o"),
            pt(0, 1, 0, "o", label="negative"),
            pt(0, 2, 0, "o", label="ambiguous"),
        ),
    )
    video = VideoRecord(video_id="v", frame_count=1, resolution=(8, 8), objects=(obj,))
    stats = dataset_stats([video])
    assert (stats.positive_points, stats.negative_points, stats.ambiguous_points) == (1, 1, 1)
    doc = stats.to_json()
    assert doc["annotated_frames_per_video"] == {"1": 1}
    assert doc["points_per_object"] == {"3": 1}


# --- serialization ---------------------------------------------------------------

def rich_fixture():
    rng = random.Random(42)
    return [random_video(rng, i) for i in range(5)]


def test_json_roundtrip_identity():
    videos = rich_fixture()
    doc = dataset_to_json(videos)
    assert dataset_from_json(doc) == videos
    assert dataset_to_json(dataset_from_json(doc)) == doc


def test_file_roundtrip(tmp_path):
    videos = rich_fixture()
    path = tmp_path / "data.json"
    save_dataset(videos, path)
    assert load_dataset(path) == videos


def test_randomized_roundtrips():
    rng = random.Random(7)
    for i in range(100):
        video = random_video(rng, i)
        assert dataset_from_json(dataset_to_json([video])) == [video]


def minimal_doc():
    return {
        "schema": "pv-schema/1",
        "videos": [
            {
                "video_id": "v",
                "frame_count": 4,
                "resolution": [64, 48],
                "objects": [
                    {
                        "object_id": "a",
                        "annotated_frames": [0],
                        "points": [],
                    },
                    {
                        "object_id": "b",
                        "annotated_frames": [0, 2],
                        "points": [
                            {"frame": 0, "x": 1, "y": 1, "label": "positive", "source": "simulated"},
                            {"frame": 0, "x": 2, "y": 1, "label": "positive", "source": "simulated"},
                            {"frame": 2, "x": 3, "y": 1, "label": "negative", "source": "verified"},
                            {"frame": 2, "x": 5, "y": 7, "label": "positive", "source": "simulated"},
                        ],
                    },
                ],
            }
        ],
    }


def test_loader_accepts_minimal_document():
    videos = dataset_from_json(minimal_doc())
    assert len(videos) == 1
    assert videos[0].objects[1].points[3].point == Point.from_pixel(5, 7)


def test_loader_reports_out_of_bounds_x_with_path():
    doc = minimal_doc()
    doc["videos"][0]["objects"][1]["points"][3]["x"] = 64
    with pytest.raises(DatasetError, match=r"\$\.videos\[0\]\.objects\[1\]\.points\[3\]\.x"):
        dataset_from_json(doc)


def test_loader_reports_out_of_bounds_y_with_path():
    doc = minimal_doc()
    doc["videos"][0]["objects"][1]["points"][2]["y"] = -1
    with pytest.raises(DatasetError, match=r"points\[2\]\.y"):
        dataset_from_json(doc)


def test_loader_rejects_missing_schema():
    with pytest.raises(DatasetError, match=r"\$\.schema"):
        dataset_from_json({"videos": []})


def test_loader_rejects_unknown_schema_version():
    with pytest.raises(DatasetError, match=r"\$\.schema"):
        dataset_from_json({"schema": "pv-schema/2", "videos": []})


def test_loader_rejects_unknown_fields_with_path():
    doc = minimal_doc()
    doc["videos"][0]["fps"] = 30
    with pytest.raises(DatasetError, match=r"\$\.videos\[0\]\.fps"):
        dataset_from_json(doc)
    doc = minimal_doc()
    doc["videos"][0]["objects"][0]["color"] = "red"
    with pytest.raises(DatasetError, match=r"objects\[0\]\.color"):
        dataset_from_json(doc)


def test_loader_rejects_bad_label_with_path():
    doc = minimal_doc()
    doc["videos"][0]["objects"][1]["points"][0]["label"] = "sure"
    with pytest.raises(DatasetError, match=r"points\[0\]\.label"):
        dataset_from_json(doc)


def test_loader_rejects_bool_as_int():
    doc = minimal_doc()
    doc["videos"][0]["objects"][1]["points"][0]["x"] = True
    with pytest.raises(DatasetError, match="expected int, got bool"):
        dataset_from_json(doc)


def test_loader_rejects_bad_frame_index():
    doc = minimal_doc()
    doc["videos"][0]["objects"][0]["annotated_frames"] = [9]
    with pytest.raises(DatasetError, match=r"annotated_frames\[0\]"):
        dataset_from_json(doc)


def test_loader_rejects_malformed_eval_masks():
    doc = minimal_doc()
    doc["videos"][0]["objects"][0]["eval_masks"] = {
        "0": {"width": 2, "height": 2, "counts": [1, 0, 3]}
    }
    with pytest.raises(DatasetError, match=r"eval_masks\['0'\]"):
        dataset_from_json(doc)
    doc["videos"][0]["objects"][0]["eval_masks"] = {
        "x": {"width": 2, "height": 2, "counts": [4]}
    }
    with pytest.raises(DatasetError, match="decimal string"):
        dataset_from_json(doc)


def test_loader_rejects_empty_reference_points():
    doc = minimal_doc()
    doc["videos"][0]["objects"][0]["reference_init"] = {"frame": 0, "points": []}
    with pytest.raises(DatasetError, match="must not be empty"):
        dataset_from_json(doc)


def test_load_dataset_wraps_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(DatasetError, match="malformed JSON"):
        load_dataset(path)


# --- grounding export -------------------------------------------------------------

def grounded_video():
    noun = NounSpan("car", CAPTION.index("car"), CAPTION.index("car") + 3)
    with_noun = ObjectAnnotation(object_id="car1", annotated_frames=(0,), noun=noun)
    without = ObjectAnnotation(object_id="extra", annotated_frames=(0,))
    return VideoRecord(
        video_id="v", frame_count=2, resolution=(8, 8), objects=(with_noun, without), caption=CAPTION
    )


def test_export_vng_skips_objects_without_nouns():
    video = grounded_video()
    masks = {("v", "car1"): {0: rle_encode(np.ones((8, 8), dtype=bool))}}
    export = export_vng([video], masks)
    assert export.skipped == 1
    assert len(export.records) == 1
    rec = export.records[0]
    assert rec.caption[rec.noun_start : rec.noun_end] == "car"
    assert 0 in rec.masks


def test_export_vng_requires_masks_for_grounded_objects():
    with pytest.raises(ValueError, match="no masks"):
        export_vng([grounded_video()], {})


def test_vng_to_json_shape():
    video = grounded_video()
    masks = {("v", "car1"): {0: Rle(width=8, height=8, counts=(64,))}}
    doc = vng_to_json(export_vng([video], masks))
    assert doc["schema"] == "pv-vng/1"
    assert doc["skipped"] == 1
    assert doc["records"][0]["masks"]["0"]["counts"] == [64]
