"""Protects the reporting pipeline: per-account token buckets against filing
floods, escalating fees for reporters with forfeits on record, and account
freezes for abusers with unpaid penalties.

Bucket levels are exact rationals over integer microseconds so a replayed
event log reproduces guard state bit-for-bit.
"""

import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from fractions import Fraction
from typing import Callable

from .errors import RateLimited
from .timefmt import ts_to_str

_MICRO = timedelta(microseconds=1)


@dataclass(frozen=True)
class RateLimitPolicy:
    capacity: int = 3
    refill_per_day: int = 3

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.refill_per_day <= 0:
            raise ValueError("refill rate must be positive")

    @property
    def tokens_per_microsecond(self) -> Fraction:
        return Fraction(self.refill_per_day, 24 * 3600 * 1_000_000)


@dataclass
class ReporterStanding:
    reporter: str
    forfeits: int = 0
    frozen: bool = False


@dataclass
class _Bucket:
    level: Fraction
    updated_at: datetime


class Guard:
    """Per-account rate limiting, fee escalation, and freeze checks.

    ``balance_of`` is injected by the platform so freezes track wallet debt:
    an account is frozen exactly while its wallet is negative.
    """

    def __init__(
        self,
        policy: RateLimitPolicy | None = None,
        balance_of: Callable[[str], int] | None = None,
    ):
        self.policy = policy or RateLimitPolicy()
        self.balance_of = balance_of or (lambda account: 0)
        self._buckets: dict[str, _Bucket] = {}
        self._standings: dict[str, ReporterStanding] = {}
        self._freeze_events: list[tuple[str, str]] = []  # (account, rfc3339 ts)
        self._lock = threading.RLock()

    # -- rate limiting ---------------------------------------------------------

    def _refill(self, bucket: _Bucket, now: datetime) -> None:
        elapsed_us = (now - bucket.updated_at) // _MICRO
        if elapsed_us > 0:
            bucket.level = min(
                Fraction(self.policy.capacity),
                bucket.level + elapsed_us * self.policy.tokens_per_microsecond,
            )
        bucket.updated_at = now

    def check_and_consume(self, reporter: str, now: datetime) -> bool:
        """Token-bucket check; raises RateLimited with a retry-after estimate."""
        with self._lock:
            bucket = self._buckets.get(reporter)
            if bucket is None:
                bucket = _Bucket(Fraction(self.policy.capacity), now)
                self._buckets[reporter] = bucket
            self._refill(bucket, now)
            if bucket.level >= 1:
                bucket.level -= 1
                return True
            deficit = 1 - bucket.level
            retry_after_s = float(deficit / self.policy.tokens_per_microsecond / 1_000_000)
            raise RateLimited(f"reporter {reporter} is over the filing limit", retry_after_s)

    def bucket_level(self, reporter: str, now: datetime) -> Fraction:
        with self._lock:
            bucket = self._buckets.get(reporter)
            if bucket is None:
                return Fraction(self.policy.capacity)
            self._refill(bucket, now)
            return bucket.level

    # -- reporter standing -------------------------------------------------------

    def standing(self, reporter: str) -> ReporterStanding:
        return self._standings.setdefault(reporter, ReporterStanding(reporter))

    def record_forfeit(self, reporter: str) -> None:
        with self._lock:
            self.standing(reporter).forfeits += 1

    def adjusted_fee(self, reporter: str, base_fee: int) -> int:
        """Fee doubles per bad-faith forfeit on record: base · 2^forfeits."""
        return base_fee * 2 ** self.standing(reporter).forfeits

    def total_forfeits(self) -> int:
        return sum(standing.forfeits for standing in self._standings.values())

    # -- freezes -------------------------------------------------------------------

    def freeze_until_paid(self, abuser: str, now: datetime) -> None:
        """Record the freeze; the flag itself tracks wallet debt automatically."""
        with self._lock:
            self.standing(abuser).frozen = True
            self._freeze_events.append((abuser, ts_to_str(now)))

    def is_frozen(self, account: str) -> bool:
        return self.balance_of(account) < 0

    def export_state(self) -> dict:
        with self._lock:
            return {
                "buckets": {
                    account: {
                        "level": str(bucket.level),
                        "updated_at": ts_to_str(bucket.updated_at),
                    }
                    for account, bucket in sorted(self._buckets.items())
                },
                "standings": {
                    account: {"forfeits": standing.forfeits, "frozen": standing.frozen}
                    for account, standing in sorted(self._standings.items())
                },
                "freeze_events": list(self._freeze_events),
            }
