from datetime import datetime, timedelta, timezone
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redress.errors import RateLimited
from redress.guard import Guard, RateLimitPolicy

T0 = datetime(2025, 1, 1, tzinfo=timezone.utc)


class TestRateLimit:
    def test_burst_consumes_capacity(self):
        guard = Guard(RateLimitPolicy(capacity=3, refill_per_day=3))
        for _ in range(3):
            assert guard.check_and_consume("alice", T0)
        with pytest.raises(RateLimited) as excinfo:
            guard.check_and_consume("alice", T0)
        assert excinfo.value.retry_after > 0

    def test_refill_after_a_day(self):
        guard = Guard(RateLimitPolicy(capacity=3, refill_per_day=3))
        for _ in range(3):
            guard.check_and_consume("alice", T0)
        assert guard.check_and_consume("alice", T0 + timedelta(hours=24))

    def test_partial_refill(self):
        guard = Guard(RateLimitPolicy(capacity=3, refill_per_day=3))
        for _ in range(3):
            guard.check_and_consume("alice", T0)
        # 8 hours restores exactly one token at 3/day
        assert guard.check_and_consume("alice", T0 + timedelta(hours=8))
        with pytest.raises(RateLimited):
            guard.check_and_consume("alice", T0 + timedelta(hours=8))

    def test_independent_buckets(self):
        guard = Guard(RateLimitPolicy(capacity=1, refill_per_day=1))
        assert guard.check_and_consume("alice", T0)
        assert guard.check_and_consume("bob", T0)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.integers(min_value=0, max_value=10**6), min_size=1, max_size=50))
    def test_level_stays_in_range(self, gaps):
        guard = Guard(RateLimitPolicy(capacity=3, refill_per_day=3))
        now = T0
        for gap in gaps:
            now += timedelta(seconds=gap)
            try:
                guard.check_and_consume("alice", now)
            except RateLimited:
                pass
            level = guard.bucket_level("alice", now)
            assert Fraction(0) <= level <= Fraction(3)


class TestAdjustedFee:
    def test_doubling_per_forfeit(self):
        guard = Guard()
        assert guard.adjusted_fee("alice", 1000) == 1000
        guard.record_forfeit("alice")
        assert guard.adjusted_fee("alice", 1000) == 2000
        guard.record_forfeit("alice")
        guard.record_forfeit("alice")
        assert guard.adjusted_fee("alice", 1000) == 8000

    def test_no_overflow_at_twenty_forfeits(self):
        guard = Guard()
        for _ in range(20):
            guard.record_forfeit("troll")
        assert guard.adjusted_fee("troll", 2**40) == 2**40 * 2**20


class TestFreeze:
    def test_frozen_tracks_wallet_debt(self):
        balances = {"mallory": -1000}
        guard = Guard(balance_of=lambda account: balances.get(account, 0))
        assert guard.is_frozen("mallory")
        balances["mallory"] = 0
        assert not guard.is_frozen("mallory")

    def test_never_charged_account(self):
        guard = Guard(balance_of=lambda account: 0)
        assert not guard.is_frozen("fresh")
