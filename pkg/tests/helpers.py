"""Shared fixture builders for the test suite."""

from __future__ import annotations

import random

import numpy as np

from pointvos.dataset import (
    NounSpan,
    ObjectAnnotation,
    PointAnnotation,
    ReferenceInit,
    VideoRecord,
)
from pointvos.masks import rle_encode
from pointvos.sampling import (
    BACKGROUND,
    FOREGROUND,
    UNCERTAIN,
    Candidate,
    CandidateSet,
    Point,
    SamplerConfig,
)

LABELS = ("positive", "negative", "ambiguous")
SOURCES = ("simulated", "verified", "rejected-candidate")

CAPTION = "a red car drives past a tall tree"
CAPTION_NOUNS = ("car", "tree")


def make_candidates(
    n_frames: int = 10,
    n_fg: int = 7,
    n_bg: int = 10,
    n_unc: int = 3,
    video_id: str = "vid",
    object_id: str = "obj",
) -> CandidateSet:
    """A deterministic candidate set with exactly the requested per-frame
    composition, points on a collision-free grid, candidates deliberately
    interleaved so queue construction has to sort them."""
    per_frame = n_fg + n_bg + n_unc
    assert per_frame <= 25
    labels = [FOREGROUND] * n_fg + [BACKGROUND] * n_bg + [UNCERTAIN] * n_unc
    candidates = []
    for i in range(per_frame):
        for f in range(n_frames):
            candidates.append(Candidate(f, Point.from_pixel(5 * i + f % 5, 3 * i + 1), labels[i]))
    cfg = SamplerConfig(n_fg=n_fg, n_bg=n_bg, n_unc=n_unc, k_frames=max(n_frames, 1))
    return CandidateSet(
        object_id=object_id,
        video_id=video_id,
        frames=tuple(range(n_frames)),
        candidates=tuple(candidates),
        config=cfg,
    )


def scripted_decision(index: int) -> tuple[str, float]:
    """A fixed verdict per queue index, so replays are comparable."""
    decision = ("accept", "reject", "ambiguous", "accept", "reject")[index % 5]
    return decision, 0.25 + (index % 7) * 0.5


def random_video(rng: random.Random, index: int = 0) -> VideoRecord:
    """A random but always-valid video record exercising every schema
    feature: nouns, seen flags, reference inits, eval masks."""
    width = rng.randrange(8, 64)
    height = rng.randrange(8, 64)
    frame_count = rng.randrange(4, 40)
    caption = CAPTION if rng.random() < 0.7 else None
    np_rng = np.random.default_rng(rng.getrandbits(32))
    objects = []
    for o in range(rng.randrange(1, 4)):
        object_id = f"obj{o}"
        n_frames = rng.randrange(1, min(6, frame_count + 1))
        frames = tuple(sorted(rng.sample(range(frame_count), n_frames)))
        points = []
        for _ in range(rng.randrange(0, 8)):
            points.append(
                PointAnnotation(
                    frame=rng.choice(frames),
                    object_id=object_id,
                    point=Point.from_pixel(rng.randrange(width), rng.randrange(height)),
                    label=rng.choice(LABELS),
                    source=rng.choice(SOURCES),
                )
            )
        reference = None
        if rng.random() < 0.5:
            reference = ReferenceInit(
                frame=rng.choice(frames),
                points=tuple(
                    Point.from_pixel(rng.randrange(width), rng.randrange(height))
                    for _ in range(rng.randrange(1, 4))
                ),
            )
        noun = None
        if caption is not None and rng.random() < 0.5:
            word = rng.choice(CAPTION_NOUNS)
            start = caption.index(word)
            noun = NounSpan(text=word, start=start, end=start + len(word))
        seen = rng.choice((None, True, False))
        eval_masks = {}
        for f in rng.sample(list(frames), rng.randrange(0, len(frames) + 1)):
            eval_masks[f] = rle_encode(np_rng.random((height, width)) < rng.uniform(0.1, 0.9))
        objects.append(
            ObjectAnnotation(
                object_id=object_id,
                annotated_frames=frames,
                points=tuple(points),
                reference_init=reference,
                noun=noun,
                seen=seen,
                eval_masks=eval_masks,
            )
        )
    return VideoRecord(
        video_id=f"video{index}",
        frame_count=frame_count,
        resolution=(width, height),
        objects=tuple(objects),
        caption=caption,
    )
