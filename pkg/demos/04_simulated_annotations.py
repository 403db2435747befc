"""
Simulating point annotations from dense masks
=============================================

Where ground-truth masks exist, point supervision can be synthesized
instead of collected: positives inside each object, negatives on the
shared background.
"""

from pointvos.dataset import VideoRecord, dataset_stats, dataset_to_json
from pointvos.sampling import simulate_point_annotations
from pointvos.synthetic import make_blob_video, shift_mask

frames = make_blob_video(width=96, height=72, frames=12, seed=5)

# Two "objects": the blob itself and a shifted copy.
gt = {
    "blob": {i: m for i, m in enumerate(frames)},
    "echo": {i: shift_mask(m, 18, 6) for i, m in enumerate(frames)},
}

annotations = simulate_point_annotations(gt, n_points=8, d=6.0, k_frames=5, seed=1)

for obj in annotations:
    pos = sum(1 for p in obj.points if p.label == "positive")
    neg = sum(1 for p in obj.points if p.label == "negative")
    print(f"{obj.object_id}: frames {obj.annotated_frames}, {pos} positive / {neg} negative")

# The first annotated frame's positives double as the inference seed.
blob = annotations[0]
print("reference init:", blob.reference_init.frame, f"({len(blob.reference_init.points)} points)")

video = VideoRecord(
    video_id="demo", frame_count=12, resolution=(96, 72), objects=tuple(annotations)
)
stats = dataset_stats([video])
print("annotated object-frames:", stats.annotation_count)
print("points per object:", stats.points_per_object)

# The whole record serializes to one JSON document.
doc = dataset_to_json([video])
print("schema:", doc["schema"], "| videos:", len(doc["videos"]))
