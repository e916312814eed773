import json
from pathlib import Path

import numpy as np
from click.testing import CliRunner

from scanforge.cli import main
from scanforge.evalbench import encode_rle, load_samples


def write_config(root: Path, **overrides) -> Path:
    doc = {
        "backends": [{"backend_id": "mock", "type": "mock", "seed": 1}],
        "mllm_backend": "mock",
        "llm_backend": "mock",
        "store": "store",
        "cache_dir": "cache",
        "images_root": "staged",
        "embed_category_hint": True,
        "filters": {"min_instances_per_category": 1},
    }
    doc.update(overrides)
    path = root / "config.json"
    path.write_text(json.dumps(doc))
    return path


def run(args):
    runner = CliRunner()
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return result.output


def test_full_cli_workflow(tmp_path):
    root = tmp_path
    config = write_config(root)

    out = run(["synth", "--out", str(root / "corpus"), "--scenes", "2", "--seed", "7", "--wall"])
    assert "2 scenes" in out

    out = run(["ingest", "--manifest-dir", str(root / "corpus"),
               "--out", str(root / "ingest.json")])
    assert "ok: 2 scenes" in out

    out = run(["annotate", "--manifest-dir", str(root / "corpus"), "--config", str(config),
               "--frame-stats-dir", str(root / "framestats")])
    assert "final=" in out
    csvs = list((root / "framestats").glob("*.csv"))
    assert len(csvs) == 8  # 4 objects x 2 scenes
    header = csvs[0].read_text().splitlines()[0]
    assert header == "frame_id,visible_points,pixel_area"

    out = run(["assemble", "--config", str(config), "--out", str(root / "densescan.jsonl"),
               "--benchmark-out", str(root / "gt.jsonl"),
               "--manifest-dir", str(root / "corpus")])
    assert "exported 6 records" in out  # 8 objects minus 2 walls

    out = run(["stats", "--config", str(config), "--out", str(root / "stats.json"),
               "--hist", str(root / "hist.csv")])
    stats = json.loads((root / "stats.json").read_text())
    assert stats["total_description_count"] == (
        stats["dense_expression_count"] + stats["question_count"]
    )
    assert (root / "hist.csv").read_text().startswith("text_kind,")

    # split the exported dataset by scene lists
    (root / "train.txt").write_text("synth_0007\n")
    (root / "val.txt").write_text("synth_0008\n")
    out = run(["split", "--records", str(root / "densescan.jsonl"),
               "--train", str(root / "train.txt"), "--val", str(root / "val.txt"),
               "--out-train", str(root / "train.jsonl"), "--out-val", str(root / "val.jsonl")])
    assert "train: 1 scenes" in out and "val: 1 scenes" in out
    n_train = len((root / "train.jsonl").read_text().splitlines())
    n_val = len((root / "val.jsonl").read_text().splitlines())
    assert n_train + n_val == 6

    # score a perfect and an abstaining prediction set
    samples = load_samples(root / "gt.jsonl")
    preds = []
    for s in samples[:-1]:  # drop one -> missing prediction
        mask = np.zeros(s.num_points, dtype=np.uint8)
        mask[list(s.gt_point_indices)] = 1
        preds.append({
            "sample_id": s.sample_id, "scene_id": s.scene_id,
            "mask_rle": encode_rle(mask), "num_points": s.num_points,
        })
    (root / "pred.jsonl").write_text("".join(json.dumps(p) + "\n" for p in preds))
    out = run(["eval", "--gt", str(root / "gt.jsonl"), "--pred", str(root / "pred.jsonl"),
               "--out", str(root / "report.json")])
    report = json.loads((root / "report.json").read_text())
    assert report["thresholds"] == [0.25, 0.5]
    n = report["n_samples"]
    assert report["miou"] == (n - 1) / n
    missing = [e for e in report["per_sample"] if e.get("missing")]
    assert len(missing) == 1

    # review: sample tasks, decide out-of-band, apply
    out = run(["review", "sample", "--config", str(config), "--rate", "1.0",
               "--seed", "0", "--out", str(root / "tasks.jsonl")])
    tasks = [json.loads(l) for l in (root / "tasks.jsonl").read_text().splitlines()]
    assert len(tasks) == 12

    rejected = tasks[0]["task_id"]
    decisions = [
        {"task_id": rejected, "verdict": "reject", "reviewer_id": "r", "edited_text": None,
         "decided_at": 0.0},
    ]
    (root / "decisions.jsonl").write_text("".join(json.dumps(d) + "\n" for d in decisions))
    out = run(["review", "apply", "--config", str(config),
               "--tasks", str(root / "tasks.jsonl"),
               "--decisions", str(root / "decisions.jsonl"),
               "--out", str(root / "reviewed.jsonl"),
               "--benchmark-out", str(root / "gt2.jsonl"),
               "--manifest-dir", str(root / "corpus")])
    reviewed_questions = set()
    for line in (root / "reviewed.jsonl").read_text().splitlines():
        doc = json.loads(line)
        for q in doc["scenario_questions"]:
            reviewed_questions.add(q)
    rejected_text = tasks[0]["question_text"]
    assert rejected_text not in reviewed_questions
    samples2 = load_samples(root / "gt2.jsonl")
    assert len(samples2) == len(samples) - 1
    assert all(s.question_text != rejected_text for s in samples2)


def test_annotate_is_deterministic_across_clean_runs(tmp_path):
    hashes = []
    for tag in ("x", "y"):
        root = tmp_path / tag
        root.mkdir()
        config = write_config(root)
        run(["synth", "--out", str(root / "corpus"), "--scenes", "1", "--seed", "3"])
        run(["annotate", "--manifest-dir", str(root / "corpus"), "--config", str(config)])
        run(["assemble", "--config", str(config), "--out", str(root / "out.jsonl")])
        hashes.append((root / "out.jsonl").read_bytes())
    assert hashes[0] == hashes[1]
