import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scanforge.errors import (
    DimensionMismatch,
    DuplicatePrediction,
    MalformedRle,
    UnknownSample,
)
from scanforge.evalbench import (
    PredictionRecord,
    SegmentationSample,
    decode_rle,
    dump_predictions,
    dump_samples,
    encode_rle,
    evaluate,
    iou,
    load_predictions,
    load_samples,
)


def brute_force_iou(a, b):
    """Independent oracle: element-wise set arithmetic."""
    inter = sum(1 for x, y in zip(a, b) if x and y)
    union = sum(1 for x, y in zip(a, b) if x or y)
    return inter / union if union else 1.0


def make_sample(sample_id, gt, n):
    return SegmentationSample(
        sample_id=sample_id,
        scene_id="s",
        question_text="q",
        gt_point_indices=tuple(gt),
        num_points=n,
    )


def make_pred(sample_id, mask):
    return PredictionRecord(
        sample_id=sample_id, scene_id="s", mask_rle=tuple(encode_rle(mask)), num_points=len(mask)
    )


class TestRle:
    def test_hand_example(self):
        assert encode_rle([0, 0, 1, 1, 1, 0, 0]) == [2, 3, 2]

    def test_leading_ones(self):
        assert encode_rle([1, 1, 1]) == [0, 3]

    def test_sum_mismatch(self):
        with pytest.raises(MalformedRle):
            decode_rle([2, 3], num_points=7)

    def test_negative_run(self):
        with pytest.raises(MalformedRle):
            decode_rle([2, -1, 6], num_points=7)

    def test_interior_zero_run(self):
        with pytest.raises(MalformedRle):
            decode_rle([2, 0, 5], num_points=7)

    def test_empty(self):
        assert encode_rle([]) == []
        assert decode_rle([], 0).tolist() == []

    @given(st.lists(st.booleans(), min_size=0, max_size=256))
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, bits):
        mask = np.array(bits, dtype=np.uint8)
        runs = encode_rle(mask)
        assert decode_rle(runs, len(mask)).tolist() == mask.tolist()
        # canonical form: only the first run may be zero
        assert all(r > 0 for r in runs[1:])


class TestIou:
    def test_identity(self):
        m = np.zeros(20, dtype=np.uint8)
        m[:10] = 1
        assert iou(m, m) == 1.0

    def test_half_overlap(self):
        gt = np.zeros(20, dtype=np.uint8)
        gt[:10] = 1
        pred = np.zeros(20, dtype=np.uint8)
        pred[:5] = 1
        assert iou(pred, gt) == 0.5

    def test_disjoint(self):
        a = np.array([1, 1, 0, 0], dtype=np.uint8)
        b = np.array([0, 0, 1, 1], dtype=np.uint8)
        assert iou(a, b) == 0.0

    def test_empty_conventions(self):
        empty = np.zeros(5, dtype=np.uint8)
        one = np.array([1, 0, 0, 0, 0], dtype=np.uint8)
        assert iou(empty, empty) == 1.0
        assert iou(one, empty) == 0.0
        assert iou(empty, one) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            iou(np.zeros(3), np.zeros(4))

    @given(st.integers(1, 200), st.integers(0, 2**32 - 1))
    @settings(max_examples=100, deadline=None)
    def test_matches_brute_force(self, n, seed):
        rng = np.random.default_rng(seed)
        a = rng.integers(0, 2, size=n).astype(np.uint8)
        b = rng.integers(0, 2, size=n).astype(np.uint8)
        assert iou(a, b) == brute_force_iou(a.tolist(), b.tolist())
        assert iou(a, b) == iou(b, a)


class TestEvaluate:
    def test_perfect_and_zero_pair(self):
        gt = [1, 1, 1, 1, 0, 0, 0, 0]
        samples = [make_sample("a", [0, 1, 2, 3], 8), make_sample("b", [0, 1, 2, 3], 8)]
        preds = [make_pred("a", gt), make_pred("b", [0, 0, 0, 0, 1, 1, 1, 1])]
        report = evaluate(samples, preds)
        assert report.miou == 0.5
        assert report.acc_at[0.25] == 0.5
        assert report.acc_at[0.5] == 0.5

    def test_threshold_strictness_at_0_3(self):
        # IoU 0.3: 3 of gt's 10 predicted plus nothing else -> 3/10
        samples = [make_sample("a", list(range(10)), 20)]
        pred_mask = [1] * 3 + [0] * 17
        preds = [make_pred("a", pred_mask)]
        report = evaluate(samples, preds)
        assert report.per_sample[0]["iou"] == 0.3
        assert report.acc_at[0.25] == 1.0
        assert report.acc_at[0.5] == 0.0

    def test_missing_prediction_scores_zero_and_is_flagged(self):
        samples = [make_sample("a", [0], 4), make_sample("b", [1], 4)]
        preds = [make_pred("a", [1, 0, 0, 0])]
        report = evaluate(samples, preds)
        by_id = {e["sample_id"]: e for e in report.per_sample}
        assert by_id["b"]["iou"] == 0.0
        assert by_id["b"]["missing"] is True
        assert report.miou == 0.5

    def test_duplicate_prediction(self):
        samples = [make_sample("a", [0], 4)]
        preds = [make_pred("a", [1, 0, 0, 0]), make_pred("a", [1, 0, 0, 0])]
        with pytest.raises(DuplicatePrediction):
            evaluate(samples, preds)

    def test_unknown_sample(self):
        samples = [make_sample("a", [0], 4)]
        with pytest.raises(UnknownSample):
            evaluate(samples, [make_pred("zzz", [1, 0, 0, 0])])

    def test_num_points_mismatch(self):
        samples = [make_sample("a", [0], 4)]
        with pytest.raises(DimensionMismatch):
            evaluate(samples, [make_pred("a", [1, 0, 0])])

    def test_acc_monotone_in_threshold(self):
        rng = np.random.default_rng(3)
        samples, preds = [], []
        for i in range(30):
            gt = rng.integers(0, 2, size=50)
            if gt.sum() == 0:
                gt[0] = 1
            pred = rng.integers(0, 2, size=50)
            samples.append(make_sample(f"s{i}", np.flatnonzero(gt).tolist(), 50))
            preds.append(make_pred(f"s{i}", pred.tolist()))
        thresholds = [0.1, 0.25, 0.5, 0.75, 0.9]
        report = evaluate(samples, preds, thresholds=thresholds)
        accs = [report.acc_at[t] for t in thresholds]
        assert accs == sorted(accs, reverse=True)

    def test_default_thresholds_in_report(self):
        samples = [make_sample("a", [0], 4)]
        report = evaluate(samples, [make_pred("a", [1, 0, 0, 0])])
        assert set(report.acc_at) == {0.25, 0.5}
        assert '"thresholds": [\n    0.25,\n    0.5\n  ]' in report.to_json()


def test_jsonl_round_trip(tmp_path):
    samples = [make_sample("a", [0, 2], 5), make_sample("b", [1], 5)]
    preds = [make_pred("a", [1, 0, 1, 0, 0])]
    dump_samples(samples, tmp_path / "gt.jsonl")
    dump_predictions(preds, tmp_path / "pred.jsonl")
    assert load_samples(tmp_path / "gt.jsonl") == samples
    assert load_predictions(tmp_path / "pred.jsonl") == preds
