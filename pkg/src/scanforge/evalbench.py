"""Scoring of scenario-driven segmentation predictions against point masks.

Ground truth and predictions travel as JSONL; predictions carry masks as
alternating run lengths (first run counts zeros). Scores are mIoU plus
Acc@k at k in {0.25, 0.5}, with Acc using strict inequality (IoU > k).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicatePrediction,
    MalformedRle,
    SchemaViolation,
    UnknownSample,
)

DEFAULT_THRESHOLDS = (0.25, 0.5)


@dataclass(frozen=True)
class SegmentationSample:
    """One benchmark item: a question and the target's ground-truth points."""

    sample_id: str
    scene_id: str
    question_text: str
    gt_point_indices: tuple[int, ...]
    num_points: int

    def validate(self):
        if self.num_points <= 0:
            raise SchemaViolation(f"{self.sample_id}: num_points must be positive")
        if not self.gt_point_indices:
            raise SchemaViolation(f"{self.sample_id}: gt_point_indices is empty")
        idx = np.asarray(self.gt_point_indices)
        if idx.min() < 0 or idx.max() >= self.num_points:
            raise SchemaViolation(
                f"{self.sample_id}: gt index out of range 0..{self.num_points - 1}"
            )
        if len(set(self.gt_point_indices)) != len(self.gt_point_indices):
            raise SchemaViolation(f"{self.sample_id}: gt indices not unique")

    def gt_mask(self) -> np.ndarray:
        mask = np.zeros(self.num_points, dtype=np.uint8)
        mask[list(self.gt_point_indices)] = 1
        return mask


@dataclass(frozen=True)
class PredictionRecord:
    """A predicted point mask, RLE-encoded."""

    sample_id: str
    scene_id: str
    mask_rle: tuple[int, ...]
    num_points: int

    def mask(self) -> np.ndarray:
        return decode_rle(self.mask_rle, self.num_points)


@dataclass
class MetricsReport:
    n_samples: int
    miou: float
    acc_at: dict[float, float]
    per_sample: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "n_samples": self.n_samples,
            "miou": self.miou,
            "thresholds": sorted(self.acc_at),
            "acc_at": {f"{k:g}": v for k, v in sorted(self.acc_at.items())},
            "per_sample": self.per_sample,
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def encode_rle(mask) -> list[int]:
    """Encode a binary vector as alternating run lengths, zeros first.

    The encoding is canonical: a leading 0 appears exactly when the mask
    starts with a set element, and no other run is zero.
    """
    arr = np.asarray(mask).astype(bool).astype(np.uint8)
    if arr.ndim != 1:
        raise MalformedRle("mask must be one-dimensional")
    if arr.size == 0:
        return []
    boundaries = np.flatnonzero(np.diff(arr)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [arr.size]))
    runs = (ends - starts).tolist()
    if arr[0] == 1:
        runs.insert(0, 0)
    return [int(r) for r in runs]


def decode_rle(runs, num_points: int) -> np.ndarray:
    """Inverse of :func:`encode_rle`; validates the run invariants."""
    runs = [int(r) for r in runs]
    if any(r < 0 for r in runs):
        raise MalformedRle(f"negative run length in {runs}")
    if any(r == 0 for r in runs[1:]):
        raise MalformedRle("zero-length run after the first")
    total = sum(runs)
    if total != num_points:
        raise MalformedRle(f"runs sum to {total}, expected num_points={num_points}")
    mask = np.zeros(num_points, dtype=np.uint8)
    pos = 0
    value = 0
    for run in runs:
        if value:
            mask[pos : pos + run] = 1
        pos += run
        value ^= 1
    return mask


def iou(pred_mask, gt_mask) -> float:
    """|pred ∩ gt| / |pred ∪ gt|. Both empty -> 1.0, exactly one empty -> 0.0."""
    pred = np.asarray(pred_mask).astype(bool)
    gt = np.asarray(gt_mask).astype(bool)
    if pred.shape != gt.shape:
        raise DimensionMismatch(f"mask lengths differ: {pred.shape} vs {gt.shape}")
    union = int(np.logical_or(pred, gt).sum())
    if union == 0:
        return 1.0
    inter = int(np.logical_and(pred, gt).sum())
    return inter / union


def evaluate(
    samples: list[SegmentationSample],
    predictions: list[PredictionRecord],
    thresholds=DEFAULT_THRESHOLDS,
) -> MetricsReport:
    """Score predictions sample-by-sample.

    Missing predictions score IoU 0 and are flagged rather than erroring, so
    abstaining models still produce comparable reports.
    """
    by_id: dict[str, PredictionRecord] = {}
    known = {s.sample_id for s in samples}
    for pred in predictions:
        if pred.sample_id not in known:
            raise UnknownSample(f"prediction for unknown sample {pred.sample_id!r}")
        if pred.sample_id in by_id:
            raise DuplicatePrediction(f"duplicate prediction for {pred.sample_id!r}")
        by_id[pred.sample_id] = pred

    per_sample = []
    ious = []
    for sample in samples:
        sample.validate()
        pred = by_id.get(sample.sample_id)
        if pred is None:
            score, missing = 0.0, True
        else:
            if pred.num_points != sample.num_points:
                raise DimensionMismatch(
                    f"{sample.sample_id}: prediction has num_points={pred.num_points}, "
                    f"sample has {sample.num_points}"
                )
            score, missing = iou(pred.mask(), sample.gt_mask()), False
        ious.append(score)
        entry = {"sample_id": sample.sample_id, "iou": score}
        if missing:
            entry["missing"] = True
        per_sample.append(entry)

    n = len(samples)
    miou = float(sum(ious) / n) if n else 0.0
    acc = {
        float(k): (sum(1 for v in ious if v > k) / n if n else 0.0)
        for k in thresholds
    }
    return MetricsReport(n_samples=n, miou=miou, acc_at=acc, per_sample=per_sample)


# --- JSONL interchange -------------------------------------------------------


def load_samples(path) -> list[SegmentationSample]:
    samples = []
    for lineno, obj in _read_jsonl(path):
        try:
            samples.append(
                SegmentationSample(
                    sample_id=str(obj["sample_id"]),
                    scene_id=str(obj["scene_id"]),
                    question_text=str(obj["question_text"]),
                    gt_point_indices=tuple(int(i) for i in obj["gt_point_indices"]),
                    num_points=int(obj["num_points"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation(f"{path}:{lineno}: bad sample record: {exc}") from exc
    return samples


def load_predictions(path) -> list[PredictionRecord]:
    preds = []
    for lineno, obj in _read_jsonl(path):
        try:
            preds.append(
                PredictionRecord(
                    sample_id=str(obj["sample_id"]),
                    scene_id=str(obj["scene_id"]),
                    mask_rle=tuple(int(r) for r in obj["mask_rle"]),
                    num_points=int(obj["num_points"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaViolation(f"{path}:{lineno}: bad prediction record: {exc}") from exc
    return preds


def dump_samples(samples: list[SegmentationSample], path):
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(
                json.dumps(
                    {
                        "sample_id": s.sample_id,
                        "scene_id": s.scene_id,
                        "question_text": s.question_text,
                        "gt_point_indices": list(s.gt_point_indices),
                        "num_points": s.num_points,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def dump_predictions(preds: list[PredictionRecord], path):
    with Path(path).open("w", encoding="utf-8") as fh:
        for p in preds:
            fh.write(
                json.dumps(
                    {
                        "sample_id": p.sample_id,
                        "scene_id": p.scene_id,
                        "mask_rle": list(p.mask_rle),
                        "num_points": p.num_points,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def _read_jsonl(path):
    path = Path(path)
    if not path.exists():
        raise SchemaViolation(f"no such file: {path}")
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"{path}:{lineno}: invalid JSON") from exc
