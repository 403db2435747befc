"""
Verification candidates from probability maps
=============================================

Each frame's foreground-probability map is split by two thresholds into
foreground / background / uncertain regions, and a budgeted set of points
is drawn from each for a human to verify.
"""

import numpy as np

from pointvos.sampling import SamplerConfig, generate_candidates, partition_probability

rng = np.random.default_rng(3)

# Ten frames of a soft, drifting blob plus noise, standing in for the
# output of a mask-propagation model.
maps = []
for t in range(10):
    ys, xs = np.mgrid[:72, :96]
    r = np.hypot(ys - 36, xs - (30 + 4 * t))
    maps.append(np.clip(1.0 - r / 28.0 + 0.08 * rng.standard_normal(ys.shape), 0.0, 1.0))

# The thresholded partition of one frame.
part = partition_probability(maps[0], lo=0.2, hi=0.8)
print(
    f"frame 0 regions: fg {part.foreground_region.sum()}, "
    f"bg {part.background_region.sum()}, uncertain {part.uncertain_region.sum()} px"
)

cfg = SamplerConfig(d=12.0)
cands = generate_candidates(maps, cfg, object_id="blob", video_id="demo")
print(f"{len(cands.candidates)} candidates over {len(set(c.frame for c in cands.candidates))} frames")

per_label: dict = {}
for c in cands.candidates:
    per_label[c.proposed_label] = per_label.get(c.proposed_label, 0) + 1
print("by proposed label:", per_label)

# The set serializes to JSON for the verification service.
doc = cands.to_json()
print("schema:", doc["schema"], "| rng:", doc["rng_algorithm"])
