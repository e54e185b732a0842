"""Shared exception bases for the latticeplan package."""


class LatticePlanError(Exception):
    """Base class for every error raised by this package."""


class LimitExceeded(LatticePlanError):
    """A configured exhaustive-computation bound was exceeded."""
