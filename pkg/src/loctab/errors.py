"""Shared error types."""


class CapacityError(Exception):
    """An enumeration, table or allocation would exceed a configured cap."""
