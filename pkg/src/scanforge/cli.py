"""The forge command line: corpus ingest and synthesis, annotation runs,
dataset assembly, statistics, splits, benchmark scoring, and the review
service."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import evalbench
from .config import load_run_setup
from .corpus import SyntheticSpec, generate_corpus, load_manifest
from .errors import ScanForgeError
from .geom import GeomParams, dump_frame_table_csv, object_frame_table
from .pipeline import (
    FilterConfig,
    annotate_scene,
    apply_filters,
    compute_stats,
    conservation_counts,
    export_benchmark,
    export_records,
    write_hist_csv,
)
from .pipeline.store import JobStore
from .review import (
    ReviewStore,
    apply_decisions,
    dump_tasks,
    load_tasks,
    sample_review_set,
)


@click.group()
def main():
    """Scan corpus annotation forge."""


def _fail(exc: Exception):
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


def _manifests_from(manifest_dir, scenes_list) -> list[Path]:
    paths = []
    if scenes_list:
        for line in Path(scenes_list).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                paths.append(Path(line))
    if manifest_dir:
        paths.extend(sorted(Path(manifest_dir).glob("*/manifest.json")))
    if not paths:
        raise click.UsageError("need --manifest-dir or --scenes with at least one manifest")
    return paths


@main.command()
@click.option("--manifest-dir", type=click.Path(exists=True), help="directory of scene dirs")
@click.option("--scenes", type=click.Path(exists=True), help="text file of manifest paths")
@click.option("--out", type=click.Path(), default=None, help="write a JSON ingest summary")
def ingest(manifest_dir, scenes, out):
    """Load and validate scene manifests."""
    summary = []
    try:
        for path in _manifests_from(manifest_dir, scenes):
            scene = load_manifest(path)
            summary.append(
                {
                    "scene_id": scene.scene_id,
                    "manifest": str(path),
                    "points": scene.num_points,
                    "instances": len(scene.instances),
                    "frames": len(scene.frames),
                }
            )
            click.echo(
                f"{scene.scene_id}: {scene.num_points} pts, "
                f"{len(scene.instances)} instances, {len(scene.frames)} frames"
            )
    except ScanForgeError as exc:
        _fail(exc)
    if out:
        Path(out).write_text(json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8")
    click.echo(f"ok: {len(summary)} scenes")


@main.command()
@click.option("--out", type=click.Path(), required=True)
@click.option("--scenes", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--boxes", type=int, default=2, show_default=True)
@click.option("--spheres", type=int, default=1, show_default=True)
@click.option("--cameras", type=int, default=8, show_default=True)
@click.option("--wall/--no-wall", default=False, show_default=True,
              help="add a structural wall instance to each scene")
def synth(out, scenes, seed, boxes, spheres, cameras, wall):
    """Generate a synthetic scan corpus for tests and demos."""
    spec = SyntheticSpec(n_boxes=boxes, n_spheres=spheres, n_cameras=cameras, include_wall=wall)
    paths = generate_corpus(out, scenes, seed, spec)
    for p in paths:
        click.echo(str(p))
    click.echo(f"ok: {len(paths)} scenes under {out}")


@main.command()
@click.option("--scenes", type=click.Path(exists=True), help="text file of manifest paths")
@click.option("--manifest-dir", type=click.Path(exists=True))
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--frame-stats-dir", type=click.Path(), default=None,
              help="debug: dump per-object frame visibility CSVs here")
def annotate(scenes, manifest_dir, config_path, frame_stats_dir):
    """Run the caption/question pipeline over scenes (resumable)."""
    try:
        setup = load_run_setup(config_path)
        for path in _manifests_from(manifest_dir, scenes):
            scene = load_manifest(path)
            if frame_stats_dir:
                stats_dir = Path(frame_stats_dir)
                stats_dir.mkdir(parents=True, exist_ok=True)
                for inst in scene.instances:
                    table = object_frame_table(scene, inst, setup.cfg.staging.geom)
                    dump_frame_table_csv(
                        table, stats_dir / f"{scene.scene_id}_{inst.instance_id}.csv"
                    )
            records = annotate_scene(scene, setup.cfg, setup.store, setup.gateway)
            counts = conservation_counts(records)
            click.echo(
                f"{scene.scene_id}: final={counts['final']} "
                f"eliminated={counts['eliminated']} of {counts['total']}"
            )
            setup.store.compact(scene.scene_id)
        click.echo(f"network calls: {setup.gateway.network_calls}")
    except ScanForgeError as exc:
        _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--benchmark-out", type=click.Path(), default=None,
              help="also emit segmentation GT samples for exported questions")
@click.option("--manifest-dir", type=click.Path(exists=True), default=None,
              help="scene manifests (required for --benchmark-out)")
@click.option("--no-filters", is_flag=True, default=False)
def assemble(config_path, out, benchmark_out, manifest_dir, no_filters):
    """Apply category filters and export the dataset JSONL."""
    try:
        setup = load_run_setup(config_path)
        records = setup.store.all_records()
        if not no_filters:
            apply_filters(records, setup.filters)
            for scene_id in setup.store.scene_ids():
                setup.store.compact(scene_id)
        n = export_records(records, out)
        counts = conservation_counts(records)
        click.echo(f"exported {n} records ({counts['eliminated']} eliminated) to {out}")
        if benchmark_out:
            if not manifest_dir:
                raise click.UsageError("--benchmark-out needs --manifest-dir")
            scenes = {}
            for path in sorted(Path(manifest_dir).glob("*/manifest.json")):
                scene = load_manifest(path)
                scenes[scene.scene_id] = scene
            k = export_benchmark(records, scenes, benchmark_out)
            click.echo(f"exported {k} benchmark samples to {benchmark_out}")
    except ScanForgeError as exc:
        _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True, help="stats JSON")
@click.option("--hist", type=click.Path(), default=None, help="histogram CSV")
def stats(config_path, out, hist):
    """Corpus statistics over the job store."""
    try:
        setup = load_run_setup(config_path)
        records = setup.store.all_records()
        st = compute_stats(records)
        Path(out).write_text(json.dumps(st.to_dict(), indent=2, sort_keys=True), encoding="utf-8")
        if hist:
            write_hist_csv(st, hist)
        click.echo(
            f"{st.scene_count} scenes, {st.instance_count} objects, "
            f"{st.dense_expression_count} expressions + {st.question_count} questions "
            f"= {st.total_description_count} descriptions"
        )
    except ScanForgeError as exc:
        _fail(exc)


@main.command()
@click.option("--records", "records_path", type=click.Path(exists=True), required=True,
              help="assembled dataset JSONL")
@click.option("--train", "train_list", type=click.Path(exists=True), required=True)
@click.option("--val", "val_list", type=click.Path(exists=True), required=True)
@click.option("--out-train", type=click.Path(), default=None)
@click.option("--out-val", type=click.Path(), default=None)
def split(records_path, train_list, val_list, out_train, out_val):
    """Partition an exported dataset by scene id lists."""
    from .pipeline.splits import read_scene_list

    try:
        train_ids = set(read_scene_list(train_list))
        val_ids = set(read_scene_list(val_list))
        both = train_ids & val_ids
        if both:
            raise ScanForgeError(f"scenes in both lists: {sorted(both)[:5]}")
        train_lines, val_lines = [], []
        train_scenes, val_scenes = set(), set()
        for line in Path(records_path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            scene_id = json.loads(line)["scene_id"]
            if scene_id in train_ids:
                train_lines.append(line)
                train_scenes.add(scene_id)
            elif scene_id in val_ids:
                val_lines.append(line)
                val_scenes.add(scene_id)
            else:
                raise ScanForgeError(f"scene {scene_id!r} is in neither split list")
        if out_train:
            Path(out_train).write_text("".join(l + "\n" for l in train_lines), encoding="utf-8")
        if out_val:
            Path(out_val).write_text("".join(l + "\n" for l in val_lines), encoding="utf-8")
        click.echo(
            f"train: {len(train_scenes)} scenes / {len(train_lines)} records; "
            f"val: {len(val_scenes)} scenes / {len(val_lines)} records"
        )
    except ScanForgeError as exc:
        _fail(exc)


@main.command(name="eval")
@click.option("--gt", "gt_path", type=click.Path(exists=True), required=True)
@click.option("--pred", "pred_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--threshold", "thresholds", type=float, multiple=True,
              help="override Acc thresholds (default 0.25 and 0.5)")
def eval_cmd(gt_path, pred_path, out, thresholds):
    """Score RLE point-mask predictions against ground truth."""
    try:
        samples = evalbench.load_samples(gt_path)
        preds = evalbench.load_predictions(pred_path)
        report = evalbench.evaluate(
            samples, preds, thresholds=thresholds or evalbench.DEFAULT_THRESHOLDS
        )
        Path(out).write_text(report.to_json(), encoding="utf-8")
        accs = " ".join(f"Acc@{k:g}={v:.4f}" for k, v in sorted(report.acc_at.items()))
        click.echo(f"n={report.n_samples} mIoU={report.miou:.4f} {accs}")
    except ScanForgeError as exc:
        _fail(exc)


@main.group()
def review():
    """Human QC: sample tasks, serve the review API/UI, apply decisions."""


@review.command(name="sample")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--rate", type=float, default=0.1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def review_sample(config_path, rate, seed, out):
    """Draw the stratified review sample from the job store."""
    try:
        setup = load_run_setup(config_path)
        tasks = sample_review_set(setup.store.all_records(), rate, seed)
        dump_tasks(tasks, out)
        click.echo(f"sampled {len(tasks)} review tasks to {out}")
    except ScanForgeError as exc:
        _fail(exc)


@review.command(name="serve")
@click.option("--tasks", "tasks_path", type=click.Path(exists=True), required=True)
@click.option("--port", type=int, default=8700, show_default=True)
@click.option("--decisions", "decisions_path", type=click.Path(), default="decisions.jsonl",
              show_default=True)
@click.option("--images-root", type=click.Path(exists=True), default=None)
@click.option("--ui-dist", type=click.Path(exists=True), default=None,
              help="built review-ui bundle to serve at /")
@click.option("--host", default="127.0.0.1", show_default=True)
def review_serve(tasks_path, port, decisions_path, images_root, ui_dist, host):
    """Run the review service."""
    from .review.service import serve as _serve

    store = ReviewStore(load_tasks(tasks_path), journal_path=decisions_path)
    click.echo(f"serving {len(store.tasks)} tasks on {host}:{port}")
    _serve(store, port, images_root=images_root, ui_dist=ui_dist, host=host)


@review.command(name="apply")
@click.option("--config", "config_path", type=click.Path(exists=True), required=True)
@click.option("--tasks", "tasks_path", type=click.Path(exists=True), required=True)
@click.option("--decisions", "decisions_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True, help="re-exported dataset JSONL")
@click.option("--benchmark-out", type=click.Path(), default=None)
@click.option("--manifest-dir", type=click.Path(exists=True), default=None)
def review_apply(config_path, tasks_path, decisions_path, out, benchmark_out, manifest_dir):
    """Fold reviewed verdicts into the store and re-export."""
    try:
        setup = load_run_setup(config_path)
        store = ReviewStore(load_tasks(tasks_path), journal_path=decisions_path)
        records = setup.store.all_records()
        apply_decisions(records, store.all_decisions())
        for rec in records:
            setup.store.persist(rec)
        for scene_id in setup.store.scene_ids():
            setup.store.compact(scene_id)
        n = export_records(records, out)
        click.echo(f"re-exported {n} records to {out}")
        if benchmark_out:
            if not manifest_dir:
                raise click.UsageError("--benchmark-out needs --manifest-dir")
            scenes = {}
            for path in sorted(Path(manifest_dir).glob("*/manifest.json")):
                scene = load_manifest(path)
                scenes[scene.scene_id] = scene
            k = export_benchmark(records, scenes, benchmark_out)
            click.echo(f"re-exported {k} benchmark samples to {benchmark_out}")
    except ScanForgeError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
