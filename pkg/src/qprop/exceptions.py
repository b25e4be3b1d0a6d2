"""Exception types shared across modules."""

from __future__ import annotations


class QPropError(Exception):
    """Base class for library errors."""


class RepresentationError(QPropError, ValueError):
    """A model cannot be expressed in the requested representation."""


class BlowUpError(QPropError, ArithmeticError):
    """A factor coefficient diverged during integration.

    Usually a pole of the w1 Riccati equation; splitting the interval into
    shorter slices avoids it.
    """

    def __init__(self, message: str, t: float, index: int | None = None):
        super().__init__(message)
        self.t = t
        self.index = index


class StabilityError(QPropError, ValueError):
    """A spectral multiplier amplifies the unresolved part of a spectrum."""

    def __init__(self, message: str, factor: str, gain: float):
        super().__init__(message)
        self.factor = factor
        self.gain = gain


class UnsupportedError(QPropError, ValueError):
    """Input outside the supported domain (e.g. complex affine factors)."""


class CutoffLeakageError(QPropError, RuntimeError):
    """Fock-space population reached the truncation edge."""
