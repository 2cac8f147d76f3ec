"""Exception hierarchy of lsdc."""

from __future__ import annotations


class LSDCError(Exception):
    """Base class for every error raised by lsdc."""


class ConfigError(LSDCError, ValueError):
    """Invalid hyperparameter, configuration key or option combination.

    Args:
    ----
        message (str): Human readable description.
        key (str | None): The offending configuration key, if known.

    """

    def __init__(self, message: str, key: str | None = None):
        """Initialise the ConfigError."""
        super().__init__(message)
        self.key = key


class DataError(LSDCError, ValueError):
    """Malformed input data, non-finite values or shape mismatch.

    Args:
    ----
        message (str): Human readable description.
        row (int | None): The offending sample row, if known.

    """

    def __init__(self, message: str, row: int | None = None):
        """Initialise the DataError."""
        super().__init__(message)
        self.row = row
