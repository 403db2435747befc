"""Human verification sessions over sampled candidates.

A session walks an annotator through one object's candidates in a fixed
queue (foreground candidates first, then background, then uncertain;
frame-ascending within each type) and records accept/reject/ambiguous
verdicts to an append-only newline-delimited JSON log.  Every verdict is
fsync'd before it is acknowledged, so a crashed session replays to
exactly the acknowledged state, and the export is a pure function of the
log.
"""

from __future__ import annotations

import json
import os
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .dataset import PointAnnotation
from .sampling import BACKGROUND, FOREGROUND, UNCERTAIN, CandidateSet, Point

DECISIONS = ("accept", "reject", "ambiguous")
_TYPE_ORDER = {FOREGROUND: 0, BACKGROUND: 1, UNCERTAIN: 2}
_LOG_VERSION = 1


class ConflictError(Exception):
    """A verdict that does not match the session's current cursor item."""


@dataclass(frozen=True)
class QueueItem:
    index: int
    frame: int
    point: Point
    proposed_label: str


@dataclass(frozen=True)
class Verdict:
    index: int
    decision: str
    duration: float


@dataclass
class Session:
    session_id: str
    video_id: str
    object_id: str
    queue: tuple[QueueItem, ...]
    overlay: dict
    log_path: Path
    created_at: float
    verdicts: list[Verdict] = field(default_factory=list)

    @property
    def cursor(self) -> int:
        return len(self.verdicts)

    @property
    def complete(self) -> bool:
        return self.cursor >= len(self.queue)

    def next_item(self) -> QueueItem | None:
        """The item awaiting a verdict, or None when the session is done.
        Pure read; repeated calls return the same item."""
        if self.complete:
            return None
        return self.queue[self.cursor]

    def record_verdict(self, index: int, decision: str, duration: float) -> dict:
        """Durably append one verdict for the current cursor item.

        The log write is flushed and fsync'd before the in-memory state
        advances, so an acknowledged verdict survives a crash.  A verdict
        for any other item (already judged or not yet current) raises
        ConflictError and changes nothing.
        """
        if decision not in DECISIONS:
            raise ValueError(f"bad decision {decision!r}")
        if duration < 0:
            raise ValueError("duration must be >= 0")
        if self.complete:
            raise ConflictError("session is complete")
        current = self.queue[self.cursor]
        if index != current.index:
            raise ConflictError(
                f"verdict for item {index}, but the current item is {current.index}"
            )
        record = {"type": "verdict", "index": index, "decision": decision, "duration": duration}
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self.verdicts.append(Verdict(index=index, decision=decision, duration=duration))
        return self.progress()

    def progress(self) -> dict:
        per_type = {
            t: {"total": 0, "accept": 0, "reject": 0, "ambiguous": 0}
            for t in (FOREGROUND, BACKGROUND, UNCERTAIN)
        }
        for item in self.queue:
            per_type[item.proposed_label]["total"] += 1
        for v in self.verdicts:
            per_type[self.queue[v.index].proposed_label][v.decision] += 1
        durations = [v.duration for v in self.verdicts]
        return {
            "session_id": self.session_id,
            "video_id": self.video_id,
            "object_id": self.object_id,
            "total": len(self.queue),
            "done": len(self.verdicts),
            "complete": self.complete,
            "per_type": per_type,
            "mean_seconds_per_point": (sum(durations) / len(durations)) if durations else None,
        }


def _build_queue(candidates: CandidateSet) -> tuple[QueueItem, ...]:
    ordered = sorted(
        candidates.candidates,
        key=lambda c: (_TYPE_ORDER[c.proposed_label], c.frame),
    )
    seen_points = set()
    for c in ordered:
        key = (c.frame, c.point.pixel())
        if key in seen_points:
            raise ValueError(
                f"duplicate candidate point {c.point.pixel()} on frame {c.frame}"
            )
        seen_points.add(key)
    return tuple(
        QueueItem(index=i, frame=c.frame, point=c.point, proposed_label=c.proposed_label)
        for i, c in enumerate(ordered)
    )


def create_session(
    candidates: CandidateSet,
    overlay: dict | None = None,
    log_path=None,
    session_id: str | None = None,
) -> Session:
    """Open a session over a candidate set and persist its header.

    `overlay` is the rough-localization geometry shown to the annotator
    (a trace polyline or reference points), passed through verbatim.
    """
    if not candidates.candidates:
        raise ValueError("cannot open a session over an empty candidate set")
    if log_path is None:
        raise ValueError("log_path is required")
    queue = _build_queue(candidates)
    session = Session(
        session_id=session_id or uuid.uuid4().hex,
        video_id=candidates.video_id,
        object_id=candidates.object_id,
        queue=queue,
        overlay=dict(overlay or {}),
        log_path=Path(log_path),
        created_at=time.time(),
    )
    header = {
        "type": "session",
        "version": _LOG_VERSION,
        "session_id": session.session_id,
        "video_id": session.video_id,
        "object_id": session.object_id,
        "created_at": session.created_at,
        "overlay": session.overlay,
        "queue": [
            {"index": q.index, "frame": q.frame, "x": q.point.col, "y": q.point.row, "proposed_label": q.proposed_label}
            for q in queue
        ],
    }
    with open(session.log_path, "x", encoding="utf-8") as fh:
        fh.write(json.dumps(header) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    return session


def export_session(session: Session, label_flip: bool = False) -> list[PointAnnotation]:
    """Turn a completed session's verdicts into point annotations.

    Accepted foreground candidates become positive points, accepted
    background candidates negative points, and any ambiguous verdict an
    ambiguous point.  Uncertain candidates carry no proposed polarity, so
    accept/reject map directly to positive/negative.  Rejected foreground
    and background candidates are dropped unless `label_flip` recycles
    them with the opposite label (source "rejected-candidate").
    """
    if not session.complete:
        remaining = [q.index for q in session.queue[session.cursor :]]
        raise ValueError(f"session has {len(remaining)} unjudged items (next: {remaining[:5]})")
    out: list[PointAnnotation] = []
    for v in session.verdicts:
        item = session.queue[v.index]
        label = None
        source = "verified"
        if v.decision == "ambiguous":
            label = "ambiguous"
        elif item.proposed_label == FOREGROUND:
            if v.decision == "accept":
                label = "positive"
            elif label_flip:
                label, source = "negative", "rejected-candidate"
        elif item.proposed_label == BACKGROUND:
            if v.decision == "accept":
                label = "negative"
            elif label_flip:
                label, source = "positive", "rejected-candidate"
        else:
            label = "positive" if v.decision == "accept" else "negative"
        if label is None:
            continue
        out.append(
            PointAnnotation(
                frame=item.frame,
                object_id=session.object_id,
                point=item.point,
                label=label,
                source=source,
            )
        )
    return out


@dataclass(frozen=True)
class RecoveredSession:
    session: Session
    warning: str | None


def _parse_line(raw: bytes, start: int):
    """(record, end offset) for the newline-terminated JSON line at
    `start`, or None when the line is truncated or malformed."""
    end = raw.find(b"\n", start)
    if end < 0:
        return None
    try:
        return json.loads(raw[start:end].decode("utf-8")), end + 1
    except (UnicodeDecodeError, json.JSONDecodeError):
        return None


def crash_recover(log_path) -> RecoveredSession:
    """Rebuild a session from its log, tolerating a corrupt tail.

    Replays verdicts until the first truncated, malformed, or semantically
    invalid record; everything from that point is discarded and the file
    is truncated back to the last valid record, so future appends keep the
    log replayable.  A corrupt or missing header is unrecoverable.
    """
    log_path = Path(log_path)
    raw = log_path.read_bytes()
    parsed = _parse_line(raw, 0)
    if parsed is None:
        raise ValueError(f"{log_path}: no valid session header")
    header, offset = parsed
    if not isinstance(header, dict) or header.get("type") != "session":
        raise ValueError(f"{log_path}: first record is not a session header")
    if header.get("version") != _LOG_VERSION:
        raise ValueError(f"{log_path}: unsupported log version {header.get('version')!r}")
    queue = tuple(
        QueueItem(
            index=q["index"],
            frame=q["frame"],
            point=Point.from_pixel(q["x"], q["y"]),
            proposed_label=q["proposed_label"],
        )
        for q in header["queue"]
    )
    session = Session(
        session_id=header["session_id"],
        video_id=header["video_id"],
        object_id=header["object_id"],
        queue=queue,
        overlay=header.get("overlay", {}),
        log_path=log_path,
        created_at=header["created_at"],
    )
    warning = None
    while offset < len(raw):
        parsed = _parse_line(raw, offset)
        record = parsed[0] if parsed else None
        valid = (
            isinstance(record, dict)
            and record.get("type") == "verdict"
            and record.get("decision") in DECISIONS
            and isinstance(record.get("duration"), (int, float))
            and record.get("duration") >= 0
            and not session.complete
            and record.get("index") == session.queue[session.cursor].index
        )
        if not valid:
            warning = f"discarded invalid log content from byte {offset}"
            with open(log_path, "r+b") as fh:
                fh.truncate(offset)
            break
        session.verdicts.append(
            Verdict(index=record["index"], decision=record["decision"], duration=float(record["duration"]))
        )
        offset = parsed[1]
    return RecoveredSession(session=session, warning=warning)
