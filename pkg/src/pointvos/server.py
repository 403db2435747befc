"""HTTP service exposing verification sessions to the browser console.

Routes (JSON bodies):

    POST /sessions                   open a session over a candidate set
    GET  /sessions/{id}/next         current item + overlay, or done
    POST /sessions/{id}/verdicts     record accept/reject/ambiguous
    GET  /sessions/{id}/progress     tallies and throughput
    POST /sessions/{id}/export       completed session -> point annotations
    GET  /config                     client configuration (hotkeys, colors)
    GET  /frames/...                 static frame images under the data root

Sessions persist under <data_root>/sessions/ and are recovered from their
logs on startup.  Mutations take a per-session lock (single writer per
session); distinct sessions proceed in parallel.
"""

from __future__ import annotations

import json
import os
import sys
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles

from . import verify
from .sampling import BACKGROUND, FOREGROUND, UNCERTAIN, CandidateSet

HOTKEYS = {"accept": "a", "reject": "r", "ambiguous": "x"}
MARKER_COLORS = {FOREGROUND: "#22a04a", BACKGROUND: "#d33636", UNCERTAIN: "#8c8c8c"}
_FRAME_EXTENSIONS = (".png", ".jpg", ".jpeg")


class SessionStore:
    """In-memory session registry backed by per-session log files and a
    manifest for startup recovery."""

    def __init__(self, data_root):
        self.data_root = Path(data_root)
        self.sessions_dir = self.data_root / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.frames_dir = self.data_root / "frames"
        self.frames_dir.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.sessions_dir / "manifest.ndjson"
        self._registry_lock = threading.Lock()
        self._sessions: dict[str, verify.Session] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._recover()

    def _recover(self):
        if not self.manifest_path.is_file():
            return
        for line in self.manifest_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            entry = json.loads(line)
            log_path = self.sessions_dir / entry["log"]
            if not log_path.is_file():
                continue
            recovered = verify.crash_recover(log_path)
            if recovered.warning:
                print(f"recovering {log_path.name}: {recovered.warning}", file=sys.stderr)
            session = recovered.session
            self._sessions[session.session_id] = session
            self._session_locks[session.session_id] = threading.Lock()

    def create(self, candidates: CandidateSet, overlay: dict | None, session_id: str | None) -> verify.Session:
        with self._registry_lock:
            sid = session_id or uuid.uuid4().hex
            if sid in self._sessions:
                raise FileExistsError(f"session {sid!r} already exists")
            log_path = self.sessions_dir / f"{sid}.ndjson"
            session = verify.create_session(candidates, overlay, log_path, session_id=sid)
            with open(self.manifest_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps({"session_id": sid, "log": log_path.name}) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._sessions[sid] = session
            self._session_locks[sid] = threading.Lock()
            return session

    def get(self, session_id: str) -> verify.Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}") from None

    def lock(self, session_id: str) -> threading.Lock:
        return self._session_locks[session_id]

    def frame_url(self, video_id: str, frame: int) -> str | None:
        for ext in _FRAME_EXTENSIONS:
            name = f"{frame:05d}{ext}"
            if (self.frames_dir / video_id / name).is_file():
                return f"/frames/{video_id}/{name}"
        return None


def _item_payload(store: SessionStore, session: verify.Session) -> dict:
    item = session.next_item()
    if item is None:
        return {"done": True, "overlay": session.overlay, "progress": session.progress()}
    return {
        "done": False,
        "item": {
            "index": item.index,
            "frame": item.frame,
            "x": item.point.col,
            "y": item.point.row,
            "proposed_label": item.proposed_label,
            "image_url": store.frame_url(session.video_id, item.frame),
        },
        "overlay": session.overlay,
        "progress": session.progress(),
    }


def create_app(data_root=None, ui_dir=None) -> FastAPI:
    """Build the service app.  `ui_dir` optionally mounts a built browser
    console at /ui so it is served from the same origin as the API."""
    if data_root is None:
        data_root = os.environ.get("POINTVOS_DATA_ROOT")
    if not data_root:
        raise ValueError("no data root given; pass data_root or set POINTVOS_DATA_ROOT")
    store = SessionStore(data_root)
    app = FastAPI(title="pointvos verification service")
    app.state.store = store

    @app.post("/sessions", status_code=201)
    def open_session(payload: dict):
        if "candidates" not in payload:
            raise HTTPException(status_code=400, detail="body must contain 'candidates'")
        try:
            candidates = CandidateSet.from_json(payload["candidates"])
            session = store.create(
                candidates,
                payload.get("overlay"),
                payload.get("session_id"),
            )
        except FileExistsError as e:
            raise HTTPException(status_code=409, detail=str(e)) from None
        except (ValueError, KeyError, TypeError) as e:
            raise HTTPException(status_code=400, detail=f"bad candidate payload: {e}") from None
        return {"session_id": session.session_id, "progress": session.progress()}

    @app.get("/sessions/{session_id}/next")
    def next_item(session_id: str):
        return _item_payload(store, store.get(session_id))

    @app.post("/sessions/{session_id}/verdicts")
    def record_verdict(session_id: str, payload: dict):
        session = store.get(session_id)
        for key in ("index", "decision", "duration"):
            if key not in payload:
                raise HTTPException(status_code=400, detail=f"verdict body missing {key!r}")
        if not isinstance(payload["index"], int) or isinstance(payload["index"], bool):
            raise HTTPException(status_code=400, detail="'index' must be an integer")
        if not isinstance(payload["duration"], (int, float)):
            raise HTTPException(status_code=400, detail="'duration' must be a number")
        with store.lock(session_id):
            try:
                progress = session.record_verdict(
                    payload["index"], payload["decision"], float(payload["duration"])
                )
            except verify.ConflictError as e:
                raise HTTPException(status_code=409, detail=str(e)) from None
            except ValueError as e:
                raise HTTPException(status_code=400, detail=str(e)) from None
        return progress

    @app.get("/sessions/{session_id}/progress")
    def progress(session_id: str):
        return store.get(session_id).progress()

    @app.post("/sessions/{session_id}/export")
    def export(session_id: str, payload: dict | None = None):
        session = store.get(session_id)
        label_flip = bool((payload or {}).get("label_flip", False))
        try:
            points = verify.export_session(session, label_flip=label_flip)
        except ValueError as e:
            raise HTTPException(status_code=409, detail=str(e)) from None
        counts = {"positive": 0, "negative": 0, "ambiguous": 0}
        for p in points:
            counts[p.label] += 1
        return {
            "video_id": session.video_id,
            "object_id": session.object_id,
            "label_flip": label_flip,
            "counts": counts,
            "points": [
                {"frame": p.frame, "x": p.point.col, "y": p.point.row, "label": p.label, "source": p.source}
                for p in points
            ],
        }

    @app.get("/config")
    def config():
        return {
            "hotkeys": HOTKEYS,
            "marker_colors": MARKER_COLORS,
            "decisions": list(verify.DECISIONS),
            "data_root": str(store.data_root),
        }

    app.mount("/frames", StaticFiles(directory=store.frames_dir), name="frames")
    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
    return app
