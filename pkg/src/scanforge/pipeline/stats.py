"""Corpus statistics: counts, word-length quartiles, and base-10 log
histograms of expression and question lengths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .records import AnnotationRecord

HIST_BINS = 30


@dataclass
class TextKindStats:
    count: int
    q1: float
    median: float
    q3: float
    hist_edges_log10: list[float]
    hist_counts: list[int]

    def to_dict(self):
        return {
            "count": self.count,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "hist_edges_log10": self.hist_edges_log10,
            "hist_counts": self.hist_counts,
        }


@dataclass
class CorpusStats:
    scene_count: int
    instance_count: int
    dense_expression_count: int
    question_count: int
    total_description_count: int
    text_kinds: dict[str, TextKindStats]
    split_sizes: dict | None = None

    def to_dict(self):
        doc = {
            "scene_count": self.scene_count,
            "instance_count": self.instance_count,
            "dense_expression_count": self.dense_expression_count,
            "question_count": self.question_count,
            "total_description_count": self.total_description_count,
            "text_kinds": {k: v.to_dict() for k, v in self.text_kinds.items()},
        }
        if self.split_sizes is not None:
            doc["split_sizes"] = self.split_sizes
        return doc


def word_count(text: str) -> int:
    return len(text.split())


def length_stats(word_counts: list[int]) -> TextKindStats:
    """Quartiles by linear interpolation; histogram uniform in log10."""
    if not word_counts:
        return TextKindStats(0, 0.0, 0.0, 0.0, [], [])
    arr = np.asarray(word_counts, dtype=np.float64)
    q1, median, q3 = np.percentile(arr, [25, 50, 75])
    logs = np.log10(arr)
    lo, hi = float(logs.min()), float(logs.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, HIST_BINS + 1)
    counts, _ = np.histogram(logs, bins=edges)
    return TextKindStats(
        count=len(word_counts),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        hist_edges_log10=[float(e) for e in edges],
        hist_counts=[int(c) for c in counts],
    )


def compute_stats(records: list[AnnotationRecord], split_sizes: dict | None = None) -> CorpusStats:
    """Statistics over the exportable corpus (final records only)."""
    final = [r for r in records if r.status == "final"]
    expressions = [r.dense_referring_expression for r in final if r.dense_referring_expression]
    questions = [q.text for r in final for q in r.passing_questions()]

    stats = CorpusStats(
        scene_count=len({r.scene_id for r in final}),
        instance_count=len(final),
        dense_expression_count=len(expressions),
        question_count=len(questions),
        total_description_count=len(expressions) + len(questions),
        text_kinds={
            "dense_referring_expression": length_stats([word_count(t) for t in expressions]),
            "scenario_question": length_stats([word_count(t) for t in questions]),
        },
        split_sizes=split_sizes,
    )
    assert stats.total_description_count == stats.dense_expression_count + stats.question_count
    return stats


def write_hist_csv(stats: CorpusStats, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("text_kind,bin_lo_log10,bin_hi_log10,count\n")
        for kind, ks in stats.text_kinds.items():
            for i, count in enumerate(ks.hist_counts):
                fh.write(
                    f"{kind},{ks.hist_edges_log10[i]!r},{ks.hist_edges_log10[i + 1]!r},{count}\n"
                )
