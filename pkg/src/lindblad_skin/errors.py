"""Exception hierarchy.

Every error records the module that raised it and the tolerance that was
violated, so the command line front end can report both.
"""

from __future__ import annotations


class LindbladSkinError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str, *, module: str = "", tolerance: float | None = None):
        super().__init__(message)
        self.module = module
        self.tolerance = tolerance

    def __str__(self) -> str:
        base = super().__str__()
        tags = []
        if self.module:
            tags.append(f"module={self.module}")
        if self.tolerance is not None:
            tags.append(f"tolerance={self.tolerance:g}")
        return f"{base} [{', '.join(tags)}]" if tags else base


class NumericalFailure(LindbladSkinError):
    """A numerical step could not be completed within tolerance."""


class PairingFailure(NumericalFailure):
    """An eigenvalue of the structure matrix has no partner of opposite sign."""


class NormalizationFailure(NumericalFailure):
    """A mode pair cannot be normalized (defective or exceptional point)."""


class UnsupportedRegime(NumericalFailure):
    """The requested quantity is not defined for these parameters."""


class ResidueTooLarge(NumericalFailure):
    """A quantity that must be real carries a large imaginary part."""


class UnstableDrift(NumericalFailure):
    """The damping matrix has an eigenvalue with non-negative real part."""


class CARViolation(NumericalFailure):
    """A Majorana covariance violates the canonical anticommutation relations."""


class SizeLimit(LindbladSkinError):
    """A dense brute-force routine was asked for a system that is too large."""


class ConfigError(LindbladSkinError):
    """A run configuration is malformed."""
