"""Exception types shared across the toolkit."""


class GlintKitError(Exception):
    """Base class for all toolkit errors."""


class DomainError(GlintKitError, ValueError):
    """An argument is outside its documented domain."""


class ProjectionError(GlintKitError):
    """A point cannot be projected (behind the camera / outside coverage)."""


class GeometryError(GlintKitError):
    """Degenerate or physically impossible geometric configuration."""


class EstimationError(GlintKitError):
    """An iterative estimator failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InsufficientDataError(GlintKitError):
    """Too few observations for the requested estimate."""


class AlignmentError(GlintKitError):
    """Prediction and ground-truth records cannot be paired up."""


class ParseError(GlintKitError):
    """A file is malformed."""


class ValidationError(GlintKitError):
    """A parsed value violates a type invariant."""


class VersionError(GlintKitError):
    """A file declares an unsupported schema version."""
