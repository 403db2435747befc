"""Command-line interface.

    pointvos sample simulate    --gt DIR --points N --frames K --dist D ...
    pointvos sample candidates  --probmaps DIR --config TOML --out JSON
    pointvos dataset stats      DATASET.json
    pointvos dataset build-val  --rules supplement2 --in ... --traces ... --out ...
    pointvos dataset export-vng --in ... --masks DIR --out ...
    pointvos eval run           --pred DIR --gt JSON --inits 1,2,5,10 --out ...
    pointvos eval correlate     --a dense.json --b sparse.json
    pointvos loss check         --map pvpm --points json
    pointvos serve              --port P --data-root DIR
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import click
import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import dataset as ds
from . import losses, metrics, sampling
from .maskio import load_mask_png, load_probability_map
from .masks import rle_encode


def _frame_index(path: Path) -> int:
    m = re.fullmatch(r"0*(\d+)", path.stem)
    if m is None:
        raise click.ClickException(f"cannot parse a frame index from {path.name!r}")
    return int(m.group(1))


def _load_mask_dir(root: Path) -> dict[str, dict[int, object]]:
    """<root>/<object_id>/<frame>.png -> {object_id: {frame: mask}}."""
    out = {}
    for obj_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        masks = {}
        for f in sorted(obj_dir.glob("*.png")):
            masks[_frame_index(f)] = load_mask_png(f)
        if masks:
            out[obj_dir.name] = masks
    if not out:
        raise click.ClickException(f"no <object>/<frame>.png masks under {root}")
    return out


@click.group()
def cli():
    """Point-VOS annotation pipeline and benchmark tools."""


# ---------------------------------------------------------------------------
# sample

@cli.group()
def sample():
    """Point and candidate sampling."""


@sample.command("simulate")
@click.option("--gt", "gt_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--points", "n_points", default=10, show_default=True, help="Points per object per frame.")
@click.option("--frames", "k_frames", default=10, show_default=True, help="Frames kept per video.")
@click.option("--dist", "d", default=20.0, show_default=True, help="Min pairwise point distance.")
@click.option("--strategy", type=click.Choice(["random", "fps"]), default="random", show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
def sample_simulate(gt_dir, n_points, k_frames, d, strategy, seed, out_path):
    """Sample sparse point annotations from dense GT masks.

    Expects <gt>/<object_id>/<frame>.png mask files; writes a one-video
    pv-schema/1 dataset.
    """
    gt = _load_mask_dir(gt_dir)
    first = next(iter(next(iter(gt.values())).values()))
    height, width = first.shape
    frame_count = max(f for masks in gt.values() for f in masks) + 1
    annotations = sampling.simulate_point_annotations(
        gt, n_points=n_points, d=d, k_frames=k_frames, strategy=strategy, seed=seed
    )
    video = ds.VideoRecord(
        video_id=gt_dir.name,
        frame_count=frame_count,
        resolution=(width, height),
        objects=tuple(annotations),
    )
    ds.save_dataset([video], out_path)
    stats = ds.dataset_stats([video])
    click.echo(
        f"wrote {out_path}: {stats.object_count} objects, "
        f"{stats.positive_points} positive / {stats.negative_points} negative points"
    )


@sample.command("candidates")
@click.option("--probmaps", "probmap_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--object-id", default=None, help="Defaults to the probmap directory name.")
@click.option("--video-id", default="", help="Video the maps belong to.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
def sample_candidates(probmap_dir, config_path, object_id, video_id, out_path):
    """Sample verification candidates from per-frame probability maps.

    Maps are the .png/.pvpm files in --probmaps, frame order by filename.
    The TOML config may set any SamplerConfig field (d, n_fg, n_bg, n_unc,
    k_frames, hi_threshold, lo_threshold, rng_seed, joint_distance).
    """
    files = sorted(
        p for p in probmap_dir.iterdir() if p.suffix.lower() in (".png", ".pvpm")
    )
    if not files:
        raise click.ClickException(f"no .png/.pvpm maps in {probmap_dir}")
    maps = [load_probability_map(p) for p in files]
    cfg_values = {}
    if config_path is not None:
        with open(config_path, "rb") as fh:
            cfg_values = tomllib.load(fh)
    try:
        cfg = sampling.SamplerConfig(**cfg_values)
    except (TypeError, ValueError) as e:
        raise click.ClickException(f"bad sampler config: {e}") from None
    candidates = sampling.generate_candidates(
        maps, cfg, object_id=object_id or probmap_dir.name, video_id=video_id
    )
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(candidates.to_json(), fh, indent=2)
        fh.write("\n")
    click.echo(
        f"wrote {out_path}: {len(candidates.candidates)} candidates over {len(candidates.frames)} frames"
    )


# ---------------------------------------------------------------------------
# dataset

@cli.group("dataset")
def dataset_group():
    """Dataset inspection, split construction, export."""


@dataset_group.command("stats")
@click.argument("dataset_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def dataset_stats_cmd(dataset_path):
    """Print dataset statistics as JSON."""
    videos = ds.load_dataset(dataset_path)
    click.echo(json.dumps(ds.dataset_stats(videos).to_json(), indent=2))


@dataset_group.command("build-val")
@click.option("--rules", type=click.Choice(["supplement2"]), default="supplement2", show_default=True)
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--traces", "traces_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
@click.option("--area", type=click.Choice(["bbox", "hull"]), default="bbox", show_default=True, help="Trace area measure for keyframe selection.")
def dataset_build_val(rules, in_path, traces_path, out_path, area):
    """Construct a validation split from verified annotations and traces.

    The traces file is {"traces": [{"video_id", "object_id", "frame",
    "points": [{"x", "y"}, ...]}, ...]}.  Objects are kept only when a
    reference frame (>= 7 positive points) exists, a later frame has >= 3
    positive and 1 negative point, and the trace keyframe follows the
    reference.
    """
    videos = ds.load_dataset(in_path)
    with open(traces_path, "r", encoding="utf-8") as fh:
        traces_doc = json.load(fh)
    segments: dict[tuple[str, str], list[ds.TraceSegment]] = {}
    for i, t in enumerate(traces_doc.get("traces", [])):
        try:
            seg = ds.TraceSegment(
                object_id=t["object_id"],
                frame=t["frame"],
                trace=tuple(sampling.Point.from_pixel(p["x"], p["y"]) for p in t["points"]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise click.ClickException(f"traces[{i}]: {e}") from None
        segments.setdefault((t["video_id"], t["object_id"]), []).append(seg)
    kept_videos = []
    kept = dropped = 0
    for video in videos:
        out_objects = []
        for obj in video.objects:
            segs = segments.get((video.video_id, obj.object_id))
            if not segs:
                dropped += 1
                continue
            trace_frame = ds.select_keyframe(segs, area=area).frame
            built = ds.build_validation_object(obj, trace_frame)
            if built is None:
                dropped += 1
            else:
                out_objects.append(built)
                kept += 1
        if out_objects:
            kept_videos.append(
                ds.VideoRecord(
                    video_id=video.video_id,
                    frame_count=video.frame_count,
                    resolution=video.resolution,
                    objects=tuple(out_objects),
                    caption=video.caption,
                )
            )
    ds.save_dataset(kept_videos, out_path)
    click.echo(f"wrote {out_path}: kept {kept} objects in {len(kept_videos)} videos, rejected {dropped}")


@dataset_group.command("export-vng")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--masks", "masks_dir", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
def dataset_export_vng(in_path, masks_dir, out_path):
    """Pair caption noun spans with pseudo-masks.

    Masks live at <masks>/<video_id>/<object_id>/<frame>.png.
    """
    videos = ds.load_dataset(in_path)
    mask_source = {}
    for video_dir in sorted(p for p in masks_dir.iterdir() if p.is_dir()):
        for obj_dir in sorted(p for p in video_dir.iterdir() if p.is_dir()):
            rles = {
                _frame_index(f): rle_encode(load_mask_png(f))
                for f in sorted(obj_dir.glob("*.png"))
            }
            if rles:
                mask_source[(video_dir.name, obj_dir.name)] = rles
    export = ds.export_vng(videos, mask_source)
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(ds.vng_to_json(export), fh, indent=2)
        fh.write("\n")
    click.echo(f"wrote {out_path}: {len(export.records)} records, skipped {export.skipped} objects without noun spans")


# ---------------------------------------------------------------------------
# eval

@cli.group("eval")
def eval_group():
    """Benchmark evaluation and ranking analysis."""


@eval_group.command("run")
@click.option("--pred", "pred_root", required=True, type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--gt", "gt_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--inits", default="1,2,5,10", show_default=True, help="Comma-separated initialization sizes.")
@click.option("--tol", default=None, type=int, help="Boundary tolerance in pixels (default: 0.8% of diagonal).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False, path_type=Path))
def eval_run(pred_root, gt_path, inits, tol, out_path):
    """Score predictions against dataset GT masks, per initialization.

    Predictions: <pred>/<init>/<video_id>/<object_id>/<frame %05d>.png.
    """
    videos = ds.load_dataset(gt_path)
    try:
        init_sizes = [int(v) for v in inits.split(",") if v.strip()]
    except ValueError:
        raise click.ClickException(f"bad --inits list: {inits!r}") from None
    if not init_sizes:
        raise click.ClickException("--inits must name at least one initialization size")
    per_init = {}
    per_object = {}
    for init in init_sizes:
        scores = metrics.evaluate_predictions(pred_root, videos, init, tol)
        if not scores:
            raise click.ClickException("dataset has no objects with eval masks")
        per_init[init] = 100.0 * float(np.mean([s.jf for s in scores.values()]))
        per_object[init] = scores
    report = metrics.benchmark_report(per_init, required=tuple(init_sizes))
    doc = {"benchmark": report.to_json()}
    labeled = {
        (v.video_id, o.object_id): "seen" if o.seen else "unseen"
        for v in videos
        for o in v.objects
        if o.eval_masks and o.seen is not None
    }
    scored_labels = {labeled[k] for k in per_object[init_sizes[0]] if k in labeled}
    if all(key in labeled for key in per_object[init_sizes[0]]) and scored_labels == {"seen", "unseen"}:
        doc["split"] = {
            str(init): metrics.split_report(
                {k: (100.0 * s.j, 100.0 * s.f) for k, s in per_object[init].items()}, labeled
            ).to_json()
            for init in init_sizes
        }
    doc["per_object"] = {
        str(init): {f"{vid}/{oid}": {"j": s.j, "f": s.f, "jf": s.jf} for (vid, oid), s in scores.items()}
        for init, scores in per_object.items()
    }
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    click.echo(report.render())


@eval_group.command("correlate")
@click.option("--a", "a_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--b", "b_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
def eval_correlate(a_path, b_path):
    """Spearman rank correlation between two score files.

    Each file is {"scores": {"<method>": <value>, ...}}; the two must
    cover the same methods.
    """
    def load_scores(path):
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict) or not isinstance(doc.get("scores"), dict):
            raise click.ClickException(f'{path}: expected {{"scores": {{...}}}}')
        return doc["scores"]

    a = load_scores(a_path)
    b = load_scores(b_path)
    if set(a) != set(b):
        raise click.ClickException("the two score files cover different methods")
    methods = sorted(a)
    rho = metrics.sparse_dense_correlation([a[m] for m in methods], [b[m] for m in methods])
    click.echo(f"spearman_rho {rho:.4f} over {len(methods)} methods")


# ---------------------------------------------------------------------------
# loss

@cli.group("loss")
def loss_group():
    """Training-loss reference numerics."""


def _coordinate(value, path_hint):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise click.ClickException(f"{path_hint}: coordinates must be numbers")
    # integer coordinates mean pixel indices, interpreted at pixel centers
    return value + 0.5 if isinstance(value, int) else float(value)


@loss_group.command("check")
@click.option("--map", "map_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--points", "points_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--eps", default=1e-7, show_default=True)
def loss_check(map_path, points_path, eps):
    """Point-wise cross entropy with analytic vs finite-difference gradients.

    The points file is {"points": [{"x", "y", "label"}, ...]} with labels
    "positive"/"negative".  All values print with 9 significant digits.
    """
    pmap = load_probability_map(map_path)
    with open(points_path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    raw_points = doc["points"] if isinstance(doc, dict) else doc
    pts = []
    for i, p in enumerate(raw_points):
        try:
            pts.append(
                losses.LabeledPoint(
                    point=sampling.Point(_coordinate(p["x"], f"points[{i}].x"), _coordinate(p["y"], f"points[{i}].y")),
                    label=p["label"],
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise click.ClickException(f"points[{i}]: {e}") from None
    if not pts:
        raise click.ClickException("no points given")
    result = losses.pointwise_ce(pmap, pts, eps=eps)
    ys = [p.y for p in pts]
    h = 1e-5
    click.echo(f"loss {result.loss:.9g}")
    click.echo("idx x y label q grad_analytic grad_fd rel_err")
    for i, (pt, q, grad) in enumerate(zip(pts, result.probabilities, result.gradients)):
        qs_hi = list(result.probabilities)
        qs_lo = list(result.probabilities)
        qs_hi[i] = q + h
        qs_lo[i] = q - h
        fd = (
            losses.pointwise_ce_from_q(qs_hi, ys, eps).loss
            - losses.pointwise_ce_from_q(qs_lo, ys, eps).loss
        ) / (2 * h)
        rel = abs(fd - grad) / max(abs(grad), 1e-12)
        click.echo(
            f"{i} {pt.point.x:.9g} {pt.point.y:.9g} {pt.label} {q:.9g} {grad:.9g} {fd:.9g} {rel:.9g}"
        )


# ---------------------------------------------------------------------------
# serve

@cli.command("serve")
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--data-root",
    envvar="POINTVOS_DATA_ROOT",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Session and frame storage root (env: POINTVOS_DATA_ROOT).",
)
@click.option(
    "--ui",
    "ui_dir",
    type=click.Path(exists=True, file_okay=False, path_type=Path),
    help="Built browser-console directory to serve at /ui.",
)
def serve(port, host, data_root, ui_dir):
    """Run the verification HTTP service."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(data_root, ui_dir=ui_dir), host=host, port=port, log_level="info")


def main():
    cli()


if __name__ == "__main__":
    main()
