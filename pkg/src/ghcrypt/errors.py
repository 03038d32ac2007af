"""Shared exception base classes.

Every domain error raised by this package derives from :class:`Error`, so
callers (the CLI in particular) can distinguish domain failures from bugs.
"""


class Error(Exception):
    """Base class for all domain errors raised by ghcrypt."""


class FormatError(Error):
    """A serialized artifact (key file, word, program, ...) is malformed."""
