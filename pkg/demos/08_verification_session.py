"""
A verification session, a crash, and a clean recovery
=====================================================

Candidates are judged one at a time in a fixed queue order; every verdict
is fsync'd to an append-only log before it is acknowledged, so a crashed
session replays to exactly the same state.
"""

import tempfile
from pathlib import Path

import numpy as np

from pointvos.sampling import SamplerConfig, generate_candidates
from pointvos.verify import crash_recover, create_session, export_session

rng = np.random.default_rng(4)
maps = [np.clip(rng.random((48, 64)), 0, 1) for _ in range(3)]
cands = generate_candidates(maps, SamplerConfig(d=10.0, k_frames=3), object_id="demo")

workdir = Path(tempfile.mkdtemp())
log = workdir / "session.ndjson"
session = create_session(cands, log_path=log, session_id="demo-session")
print(f"queue holds {len(session.queue)} items; log at {log.name}")

# Judge the first half: accept foreground proposals, reject the rest.
half = len(session.queue) // 2
while session.cursor < half:
    item = session.next_item()
    decision = "accept" if item.proposed_label == "foreground" else "reject"
    session.record_verdict(item.index, decision, duration=0.9)
print(f"judged {session.cursor}; then the process dies")

# Simulate a crash that also tore the last log line.
raw = log.read_bytes()
log.write_bytes(raw[:-9])

recovered = crash_recover(log)
print("recovery warning:", recovered.warning)
session = recovered.session
print(f"resuming at item {session.cursor}")

while not session.complete:
    item = session.next_item()
    decision = "accept" if item.proposed_label == "foreground" else "reject"
    session.record_verdict(item.index, decision, duration=0.9)

# Accepted foreground candidates become positive points; accepted
# background candidates become negative points.
exported = export_session(session)
labels = {}
for p in exported:
    labels[p.label] = labels.get(p.label, 0) + 1
print(f"export: {len(exported)} points, by label {labels}")
print("mean seconds per point:", session.progress()["mean_seconds_per_point"])
