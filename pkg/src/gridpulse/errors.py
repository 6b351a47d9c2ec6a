"""Shared exception hierarchy.

Validation failures map to CLI exit code 1, I/O problems (OSError) to 2.
"""


class GridPulseError(Exception):
    """Base for all domain errors raised by this package."""


class SnapshotParseError(GridPulseError):
    """Snapshot bytes do not conform to the documented schema."""


class SnapshotValidationError(GridPulseError):
    """Snapshot parsed but violates a record invariant."""


class SourceError(GridPulseError):
    """The configured outage source could not be fetched."""


class SourceExhausted(SourceError):
    """A replay source has no further snapshots."""


class OutOfOrderSnapshot(GridPulseError):
    """Snapshot captured_at is not after the last applied snapshot."""


class GeocoderError(GridPulseError):
    """Geocoder backend failure (retryable; distinct from not-found)."""


class StoreConflictError(GridPulseError):
    """A reconcile plan was computed against a stale processed set."""


class ModelNotFittedError(GridPulseError):
    """A prediction was requested before a transition matrix exists."""
