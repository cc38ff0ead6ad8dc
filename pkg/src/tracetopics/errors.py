"""Exception hierarchy; the CLI maps each class to a distinct exit code."""


class TraceTopicsError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(TraceTopicsError):
    """Invalid configuration value or unknown config key."""


class TraceParseError(TraceTopicsError):
    """Malformed trace line; carries file and 1-based line number."""

    def __init__(self, path: str, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class TraceStructureError(TraceTopicsError):
    """Structurally invalid trace (e.g. marker_stop without marker_start)."""


class ScoringError(TraceTopicsError):
    """Scoring precondition violated (empty corpus or empty trace)."""


class FilterError(TraceTopicsError):
    """Filtering left nothing to analyze, or bad threshold."""


class FactsError(TraceTopicsError):
    """Malformed facts file, duplicate keys, or dangling class references."""


class MatrixError(TraceTopicsError):
    """Trace-identifier matrix cannot be built (all-zero row, empty vocabulary)."""


class LdaError(TraceTopicsError):
    """Invalid LDA configuration or corpus."""


class AnalysisError(TraceTopicsError):
    """Post-model analytics precondition violated (zero vector, empty matrix)."""


class QueryError(TraceTopicsError):
    """Query cannot be answered (empty after preprocessing, unknown topic)."""


class ArtifactError(TraceTopicsError):
    """Missing, stale, or mutually inconsistent persisted artifacts."""


class PipelineError(TraceTopicsError):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage}: {cause}")
        self.stage = stage
        self.cause = cause
