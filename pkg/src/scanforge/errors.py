"""Exception types shared across the package.

Every error that callers are expected to branch on gets its own class; the
message always names the offending field, path, or id.
"""


class ScanForgeError(Exception):
    """Base class for all scanforge errors."""


# corpus
class MissingFile(ScanForgeError):
    """A referenced asset does not exist on disk."""


class SchemaViolation(ScanForgeError):
    """A manifest or record field is missing, ill-typed, or out of contract."""


class InvariantViolation(ScanForgeError):
    """Structurally valid data that breaks a domain invariant."""


# geomview / framestage
class DimensionMismatch(ScanForgeError):
    """Array shapes disagree (depth image vs. intrinsics, masks, ...)."""


class Unannotatable(ScanForgeError):
    """Object never adequately visible in any frame."""


class EmptyMask(ScanForgeError):
    """An operation that needs mask pixels received an empty mask."""


# llmgate
class UnknownTemplate(ScanForgeError):
    """No prompt template with the requested id."""


class UnboundPlaceholder(ScanForgeError):
    """A template placeholder was left without a value."""


class TransientBackendError(ScanForgeError):
    """Retryable backend failure (timeouts, 429s, 5xx)."""


class BackendUnavailable(ScanForgeError):
    """Retry attempts exhausted, or a permanent backend failure."""


class ContentRefusal(ScanForgeError):
    """The backend declined to answer."""


class BudgetExceeded(ScanForgeError):
    """The per-run network call cap was hit."""


class ConfigError(ScanForgeError):
    """Bad backend or pipeline configuration."""


# pipeline
class UnassignedScene(ScanForgeError):
    """A record's scene id appears in neither split list."""


# evalbench
class MalformedRle(ScanForgeError):
    """Run lengths violate the encoding invariants."""


class DuplicatePrediction(ScanForgeError):
    """Two predictions for the same sample id."""


class UnknownSample(ScanForgeError):
    """A prediction references a sample id not in the ground truth."""


# reviewsvc
class UnknownTask(ScanForgeError):
    """A decision references a task or question that does not exist."""
