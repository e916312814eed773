"""Category gates applied to the assembled corpus: structural-object
blocklist plus an under-sampled category threshold. Nothing is deleted;
dropped records flip to eliminated(category_filtered) and stay auditable.
"""

from __future__ import annotations

from collections import Counter

from .records import AnnotationRecord, FilterConfig


def apply_filters(records: list[AnnotationRecord], config: FilterConfig) -> list[AnnotationRecord]:
    """Mutates matching records to eliminated(category_filtered); returns records.

    Category frequencies are counted over records still in play (not already
    eliminated), so the threshold reflects the corpus being exported.
    """
    counts = Counter(rec.category for rec in records if rec.status != "eliminated")
    for rec in records:
        if rec.status == "eliminated":
            continue
        blocked = rec.category in config.blocked_categories
        undersampled = counts[rec.category] < config.min_instances_per_category
        if blocked or undersampled:
            rec.eliminate("category_filtered")
    return records
