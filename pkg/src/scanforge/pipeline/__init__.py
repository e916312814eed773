from .assemble import export_benchmark, export_dict, export_records, load_exported
from .filters import apply_filters
from .matching import load_synonyms, mask_category, normalize_for_match, parse_category_list
from .records import (
    AnnotationRecord,
    FilterConfig,
    Question,
    conservation_counts,
)
from .runner import PipelineConfig, annotate_scene, consistency_check, generate_questions, run_object
from .splits import read_scene_list, split_dataset
from .stats import CorpusStats, compute_stats, length_stats, word_count, write_hist_csv
from .store import JobStore

__all__ = [
    "export_benchmark",
    "export_dict",
    "export_records",
    "load_exported",
    "apply_filters",
    "load_synonyms",
    "mask_category",
    "normalize_for_match",
    "parse_category_list",
    "AnnotationRecord",
    "FilterConfig",
    "Question",
    "conservation_counts",
    "PipelineConfig",
    "annotate_scene",
    "consistency_check",
    "generate_questions",
    "run_object",
    "read_scene_list",
    "split_dataset",
    "CorpusStats",
    "compute_stats",
    "length_stats",
    "word_count",
    "write_hist_csv",
    "JobStore",
]
