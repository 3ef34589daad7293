"""RFC 3339 UTC timestamp helpers used by every export format."""

from datetime import datetime, timezone

UTC = timezone.utc


def ts_to_str(ts: datetime) -> str:
    """Render an aware UTC datetime as RFC 3339 with a Z suffix."""
    if ts.tzinfo is None:
        raise ValueError("timestamp must be timezone-aware")
    return ts.astimezone(UTC).isoformat().replace("+00:00", "Z")


def str_to_ts(s: str) -> datetime:
    return datetime.fromisoformat(s.replace("Z", "+00:00")).astimezone(UTC)


def utcnow() -> datetime:
    return datetime.now(UTC)
