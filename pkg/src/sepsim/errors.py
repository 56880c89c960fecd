"""Error taxonomy shared across the package.

The CLI maps these onto exit codes: UsageError -> 2, HypothesisViolation -> 3,
HardFault and verification failures -> 1.
"""


class SepsimError(Exception):
    """Base class for all package errors."""


class UsageError(SepsimError):
    """Malformed input: unparsable files, schema violations, bad CLI usage."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(message if location is None else f"{location}: {message}")


class HypothesisViolation(SepsimError):
    """A scenario fails the hypotheses its construction assumes."""


class HardFault(SepsimError):
    """A run falsified an assertion the underlying argument guarantees.

    These are never user errors; they indicate either a corrupted scenario
    that slipped past the audits or a bug in the construction itself.
    """
