"""Exception hierarchy shared across the package."""

from __future__ import annotations


class EpiriskError(Exception):
    """Base class for all library errors."""


class ValidationError(EpiriskError):
    """A value is outside its documented domain (bad probability, n=0, ...)."""


class SchemaMismatchError(EpiriskError):
    """An id (contact type, modifier, feature) is not declared by the model/schema."""


class ConfigurationError(EpiriskError):
    """Required configuration is missing (e.g. an unknown-capable feature without a prior)."""


class SchemaValidationError(EpiriskError):
    """A questionnaire schema document is invalid.

    ``violations`` lists every problem found, not just the first.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class AnswerValidationError(EpiriskError):
    """One or more answers are invalid; ``details`` maps question ids to messages."""

    def __init__(self, details: list[tuple[str, str]]):
        self.details = list(details)
        super().__init__("; ".join(f"{qid}: {msg}" for qid, msg in self.details))


class ModelFormatError(EpiriskError):
    """A model JSON document is malformed (unknown fields, bad discriminator, ...)."""


class IngestError(EpiriskError):
    """A cohort CSV cannot be ingested at all (missing header/outcome column, no rows)."""


class DegenerateDesignError(EpiriskError):
    """The weighted design matrix is singular even after ridge regularization.

    ``columns`` names the collinear design columns.
    """

    def __init__(self, message: str, columns: list[str]):
        self.columns = list(columns)
        super().__init__(message)


class FitError(EpiriskError):
    """Model fitting failed (e.g. non-convergence with auto-ridge disabled)."""


class RegistryError(EpiriskError):
    """Model registry violation (unknown version, feature-set mismatch, ...)."""
