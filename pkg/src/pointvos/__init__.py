"""Point-VOS: sparse point annotation tooling and benchmark evaluation.

The package covers the full pipeline around point-supervised video object
segmentation: mask and probability-map primitives, point/frame sampling,
candidate generation for human verification, a verification service, the
dataset schema with its split-construction rules, J&F benchmark scoring,
and reference training-loss numerics.
"""

from .masks import (
    Rle,
    as_mask,
    as_probability_map,
    boundary,
    dilate,
    distance_transform,
    rle_decode,
    rle_encode,
)
from .maskio import (
    load_mask_png,
    load_probability_map,
    load_probability_png,
    load_probability_pvpm,
    save_mask_png,
    save_probability_png,
    save_probability_pvpm,
)
from .rng import RNG_ALGORITHM, Xoshiro256
from .sampling import (
    Candidate,
    CandidateSet,
    Point,
    RegionPartition,
    SamplerConfig,
    generate_candidates,
    mask_center,
    partition_probability,
    sample_fps,
    sample_random_min_dist,
    simulate_point_annotations,
    subsample_frames_even,
    subsample_frames_random,
)
from .dataset import (
    DatasetError,
    DatasetStats,
    NounSpan,
    ObjectAnnotation,
    PointAnnotation,
    ReferenceInit,
    TraceSegment,
    VideoRecord,
    VngRecord,
    build_validation_object,
    dataset_stats,
    export_vng,
    load_dataset,
    save_dataset,
    select_eval_frames,
    select_keyframe,
    select_reference_frame,
)
from .metrics import (
    BenchmarkReport,
    FrameScore,
    SplitReport,
    benchmark_report,
    boundary_f,
    default_tolerance,
    evaluate_object,
    evaluate_predictions,
    jaccard,
    run_benchmark,
    sparse_dense_correlation,
    split_report,
)
from .losses import (
    LabeledPoint,
    LossResult,
    bilinear_sample,
    huberised_ce,
    pointwise_ce,
    pointwise_ce_from_q,
    rasterize_points,
)
from .verify import (
    ConflictError,
    QueueItem,
    Session,
    Verdict,
    crash_recover,
    create_session,
    export_session,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
