import hashlib
import random
from datetime import datetime, timedelta, timezone

import pytest

from redress.errors import (
    AlreadyErased,
    EmptyContent,
    NotFound,
    Purged,
    UnreferencedAccess,
)
from redress.vault import EvidenceVault, PostContent, RetentionPolicy

T0 = datetime(2025, 1, 1, tzinfo=timezone.utc)
DAY = timedelta(days=1)


@pytest.fixture
def vault():
    return EvidenceVault(RetentionPolicy(retention_window=timedelta(days=180)))


class TestSnapshot:
    def test_snapshot_id_matches_independent_hash(self, vault):
        # documented canonical encoding: {"media":[...],"text":...} as
        # minified sorted-key UTF-8 JSON, hashed with SHA-256
        snapshot = vault.snapshot_post("p1", "alice", PostContent("hello"), T0)
        assert snapshot.snapshot_id == hashlib.sha256(b'{"media":[],"text":"hello"}').digest()

    def test_content_addressing_idempotent(self, vault):
        a = vault.snapshot_post("p1", "alice", PostContent("same text"), T0)
        b = vault.snapshot_post("p1", "alice", PostContent("same text"), T0 + DAY)
        assert a.snapshot_id == b.snapshot_id
        assert a is b

    def test_empty_content_rejected(self, vault):
        with pytest.raises(EmptyContent):
            vault.snapshot_post("p1", "alice", PostContent(""), T0)

    def test_distinct_contents_distinct_ids(self, vault):
        rng = random.Random(3)
        seen = {}
        for i in range(300):
            text = f"post number {rng.randrange(10**9)} {i}"
            snapshot = vault.snapshot_post(f"p{i}", "alice", PostContent(text), T0)
            if snapshot.snapshot_id in seen:
                assert seen[snapshot.snapshot_id] == snapshot.content
            seen[snapshot.snapshot_id] = snapshot.content


class TestErase:
    def test_erase_hides_from_normal_fetch(self, vault):
        vault.publish_post("p1", "bob", PostContent("abusive"), T0)
        assert vault.fetch_post("p1").text == "abusive"
        vault.erase_post("p1", "bob", T0 + DAY)
        with pytest.raises(NotFound):
            vault.fetch_post("p1")

    def test_purge_deadline_is_erase_plus_window(self, vault):
        vault.publish_post("p1", "bob", PostContent("abusive"), T0)
        tombstone = vault.erase_post("p1", "bob", T0)
        assert tombstone.purge_deadline == T0 + 180 * DAY

    def test_double_erase(self, vault):
        vault.publish_post("p1", "bob", PostContent("x"), T0)
        vault.erase_post("p1", "bob", T0)
        with pytest.raises(AlreadyErased):
            vault.erase_post("p1", "bob", T0 + DAY)

    def test_erase_unknown(self, vault):
        with pytest.raises(NotFound):
            vault.erase_post("nope", "bob", T0)

    def test_erase_preserves_content_for_later_citation(self, vault):
        # hit-and-run: erase happens before any report cites the post
        vault.publish_post("p1", "bob", PostContent("you will regret this"), T0)
        vault.erase_post("p1", "bob", T0 + DAY)
        snapshot = vault.snapshot_existing("p1", T0 + 2 * DAY)
        assert snapshot.content.text == "you will regret this"
        assert snapshot.captured_at <= snapshot.erased_at


class TestFetchEvidence:
    def _file(self, vault, report="case-1"):
        vault.publish_post("p1", "bob", PostContent("threat"), T0)
        snapshot = vault.snapshot_post("p1", "bob", PostContent("threat"), T0 + DAY)
        vault.cite(report, [snapshot.snapshot_id])
        return snapshot

    def test_erased_post_still_fetchable_within_window(self, vault):
        snapshot = self._file(vault)
        vault.erase_post("p1", "bob", T0 + 2 * DAY)
        content = vault.fetch_evidence(snapshot.snapshot_id, "case-1", T0 + 32 * DAY)
        assert content.text == "threat"

    def test_non_citing_caller_refused(self, vault):
        snapshot = self._file(vault)
        with pytest.raises(UnreferencedAccess):
            vault.fetch_evidence(snapshot.snapshot_id, "case-other", T0 + 2 * DAY)

    def test_past_deadline_purged(self, vault):
        snapshot = self._file(vault)
        vault.erase_post("p1", "bob", T0 + 2 * DAY)
        with pytest.raises(Purged):
            vault.fetch_evidence(snapshot.snapshot_id, "case-1", T0 + 2 * DAY + 181 * DAY)

    def test_unknown_snapshot(self, vault):
        with pytest.raises(NotFound):
            vault.fetch_evidence(b"\x00" * 32, "case-1", T0)


class TestPurge:
    def test_nothing_eligible(self, vault):
        vault.publish_post("p1", "bob", PostContent("x"), T0)
        vault.snapshot_post("p1", "bob", PostContent("x"), T0)
        assert vault.purge_expired(T0 + 400 * DAY) == 0  # never erased

    def test_expired_snapshot_removed(self, vault):
        vault.publish_post("p1", "bob", PostContent("x"), T0)
        vault.erase_post("p1", "bob", T0)
        assert vault.purge_expired(T0 + 181 * DAY) == 1
        assert vault.purge_expired(T0 + 181 * DAY) == 0  # monotone

    def test_boundary_exactly_at_deadline(self, vault):
        vault.publish_post("p1", "bob", PostContent("x"), T0)
        vault.erase_post("p1", "bob", T0)
        assert vault.purge_expired(T0 + 180 * DAY) == 0  # deadline not yet strictly past

    def test_open_case_pins_snapshot(self, vault):
        vault.publish_post("p1", "bob", PostContent("x"), T0)
        snapshot = vault.snapshot_post("p1", "bob", PostContent("x"), T0)
        vault.cite("case-1", [snapshot.snapshot_id])
        vault.erase_post("p1", "bob", T0)
        open_cases = {"case-1"}
        vault.pin_check = lambda ref: ref in open_cases
        assert vault.purge_expired(T0 + 200 * DAY) == 0
        # pinned snapshot stays fetchable past the window while the case is open
        assert vault.fetch_evidence(snapshot.snapshot_id, "case-1", T0 + 200 * DAY).text == "x"
        open_cases.clear()
        assert vault.purge_expired(T0 + 200 * DAY) == 1
        with pytest.raises(Purged):
            vault.fetch_evidence(snapshot.snapshot_id, "case-1", T0 + 200 * DAY)


class TestExport:
    def test_snapshot_export_hex_digests(self, vault):
        snapshot = vault.snapshot_post("p1", "bob", PostContent("x", media=("ab" * 32,)), T0)
        exported = vault.export_snapshots()
        assert exported == [
            {
                "snapshot_id": snapshot.snapshot_id.hex(),
                "post_id": "p1",
                "author": "bob",
                "captured_at": "2025-01-01T00:00:00Z",
                "content": {"media": ["ab" * 32], "text": "x"},
                "erased_at": None,
            }
        ]
        assert exported[0]["snapshot_id"] == exported[0]["snapshot_id"].lower()
