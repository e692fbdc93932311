"""Shared exception and warning types.

Errors that indicate a numerical guard tripping (rather than bad usage)
derive from GuardError so the CLI can map them to a distinct exit code.
"""


class MfunError(Exception):
    """Base class for all package-specific errors."""


class RegimeError(MfunError):
    """An evaluator was called outside its rigorous domain of validity."""


class CutoffError(MfunError):
    """A truncation cutoff is insufficient for the requested tolerance."""


class GuardError(MfunError):
    """A runtime numerical guard failed (aliasing, decay, self-check)."""


class FormatError(MfunError, ValueError):
    """A data file does not match its declared format."""


class PrecisionWarning(UserWarning):
    """A self-check moved the result more than the advertised precision."""
