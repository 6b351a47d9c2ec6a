"""RFC3339 timestamp helpers, UTC only, second precision on output."""

from __future__ import annotations

from datetime import datetime, timezone


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC3339 timestamp into an aware UTC datetime.

    Accepts 'Z' or numeric offsets; naive timestamps are rejected.
    """
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValueError(f"not an RFC3339 timestamp: {value!r}") from exc
    if dt.tzinfo is None:
        raise ValueError(f"timestamp lacks a UTC offset: {value!r}")
    return dt.astimezone(timezone.utc)


def format_rfc3339(dt: datetime) -> str:
    """Format as 'YYYY-MM-DDTHH:MM:SSZ', truncating sub-second precision."""
    if dt.tzinfo is None:
        raise ValueError("naive datetime cannot be formatted as RFC3339")
    return dt.astimezone(timezone.utc).replace(microsecond=0).strftime("%Y-%m-%dT%H:%M:%SZ")
