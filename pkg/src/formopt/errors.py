"""Exception hierarchy shared across the package."""


class FormoptError(Exception):
    """Base class for all package errors."""


class DimensionError(FormoptError, ValueError):
    """Vector or matrix shapes do not agree."""


class EvaluationError(FormoptError, ValueError):
    """An objective or model could not be evaluated (NaN, undefined normalization)."""


class ConfigError(FormoptError, ValueError):
    """Invalid algorithm, experiment or pipeline configuration."""


class SelectionError(FormoptError, ValueError):
    """Two operands that must be distinct population members are the same."""


class MetricError(FormoptError, ValueError):
    """A performance metric is undefined for the given data."""


class TrainingError(FormoptError, RuntimeError):
    """Model training diverged or failed."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch


class PlanError(FormoptError, ValueError):
    """A sample-size assessment plan is inconsistent with the data."""


class SchemaError(FormoptError, ValueError):
    """A dataset file lacks a declared column."""


class DataError(FormoptError, ValueError):
    """A dataset is empty or unusable after validation."""


class LeakageError(FormoptError, AssertionError):
    """Training rows overlap the evaluation rows."""
