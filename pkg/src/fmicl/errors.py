"""Semantic exception hierarchy shared across the package.

Public functions never raise bare ``ValueError``; they raise one of the
classes below so callers (and the CLI) can map failures to exit codes.
"""

from __future__ import annotations


class FmiclError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FmiclError, ValueError):
    """A point lies outside the mathematical domain of the requested function."""


class ParameterError(FmiclError, ValueError):
    """A hyperparameter or configuration value violates its contract."""


class NormalizationError(FmiclError, ValueError):
    """An input that must consist of unit-norm vectors does not."""


class BatchTooSmall(FmiclError, ValueError):
    """A pairwise operation was given fewer than two samples."""


class DegenerateEmbedding(FmiclError, FloatingPointError):
    """A pre-normalization encoder output row is numerically zero."""


class NumericalDivergence(FmiclError, FloatingPointError):
    """Training produced a non-finite loss value.

    Carries the epoch and batch index at which the blow-up was detected.
    """

    def __init__(self, message: str, epoch: int | None = None, batch: int | None = None):
        super().__init__(message)
        self.epoch = epoch
        self.batch = batch


class ConfigError(FmiclError, ValueError):
    """Malformed, missing, or inconsistent CLI configuration input."""
