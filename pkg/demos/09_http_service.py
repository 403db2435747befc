"""
Driving the verification service over HTTP
==========================================

The same session flow as demo 08, but through the REST API the browser
console uses.  The service is stateless across restarts: everything is
rebuilt from the session logs.
"""

import tempfile
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from pointvos.sampling import SamplerConfig, generate_candidates
from pointvos.server import create_app

data_root = Path(tempfile.mkdtemp())
client = TestClient(create_app(data_root=data_root))

print("hotkeys:", client.get("/config").json()["hotkeys"])

rng = np.random.default_rng(8)
maps = [rng.random((32, 48)) for _ in range(2)]
cands = generate_candidates(maps, SamplerConfig(d=9.0, k_frames=2), object_id="demo")

resp = client.post("/sessions", json={"candidates": cands.to_json(), "session_id": "s1"})
total = resp.json()["progress"]["total"]
print(f"opened session s1 with {total} items")

# Judge everything, alternating decisions.
decisions = ("accept", "reject", "ambiguous")
while True:
    payload = client.get("/sessions/s1/next").json()
    if payload["done"]:
        break
    item = payload["item"]
    verdict = {
        "index": item["index"],
        "decision": decisions[item["index"] % 3],
        "duration": 0.8,
    }
    client.post("/sessions/s1/verdicts", json=verdict).raise_for_status()

# A stale client replaying an old verdict gets a conflict, not a dupe.
stale = client.post("/sessions/s1/verdicts", json={"index": 0, "decision": "accept", "duration": 1})
print("replayed verdict 0 ->", stale.status_code, stale.json()["detail"])

progress = client.get("/sessions/s1/progress").json()
print("done:", progress["done"], "of", progress["total"])

export = client.post("/sessions/s1/export", json={}).json()
print(f"export carries {len(export['points'])} points")

# A fresh app over the same directory sees the finished session.
reborn = TestClient(create_app(data_root=data_root))
print("after restart, done =", reborn.get("/sessions/s1/progress").json()["done"])
