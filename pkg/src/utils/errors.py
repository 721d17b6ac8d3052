"""
Exception types for fatal pipeline conditions.

Each subclasses the built-in type callers would otherwise catch, so
``except ValueError`` keeps working for code that does not care about
the distinction.
"""

from __future__ import annotations


class EmptyInputError(ValueError):
    """Raised when an operation receives nothing to work on."""


class EmptyCorpusError(EmptyInputError):
    """Raised when an input yields zero usable records."""


class InputMismatchError(ValueError):
    """Raised when two inputs that must describe the same items do not."""


class AgreementGateError(ValueError):
    """Raised when inter-annotator agreement falls below the configured gate."""


class NumericError(ArithmeticError):
    """Raised when a model produces a non-finite value."""


class MissingArtifactError(FileNotFoundError):
    """Raised when a stage runs before the stage that produces its input."""

    def __init__(self, artifact: str, stage: str) -> None:
        self.artifact = artifact
        self.stage = stage
        super().__init__(
            f"Missing artifact '{artifact}'. Run the '{stage}' stage first "
            f"(or pass its input explicitly)."
        )


__all__ = [
    "EmptyInputError",
    "EmptyCorpusError",
    "InputMismatchError",
    "AgreementGateError",
    "NumericError",
    "MissingArtifactError",
]
