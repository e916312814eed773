from .decisions import apply_decisions
from .sampling import ReviewTask, dump_tasks, load_tasks, sample_review_set, task_id_for
from .service import (
    AlreadyDecided,
    ReviewDecision,
    ReviewStore,
    create_app,
    serve,
)

__all__ = [
    "apply_decisions",
    "ReviewTask",
    "dump_tasks",
    "load_tasks",
    "sample_review_set",
    "task_id_for",
    "AlreadyDecided",
    "ReviewDecision",
    "ReviewStore",
    "create_app",
    "serve",
]
