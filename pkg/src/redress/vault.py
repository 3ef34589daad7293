"""Content-addressed evidence store that outlives post erasure.

Posts are snapshotted at report time; erasing a post tombstones it for normal
readers but first captures a snapshot, so content stays retrievable through
citing reports for a retention window (default 180 days) after erasure.
Snapshots cited by a case that is still open are never purged, whatever the
clock says.

Snapshot ids are the SHA-256 digest of the canonical encoding of the content:
``canonicalize({"media": [<hex digests>], "text": <body>})`` — UTF-8 text,
byte identity, no Unicode normalization.
"""

import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Callable, Optional

from .attest import digest
from .errors import AlreadyErased, EmptyContent, NotFound, Purged, UnreferencedAccess
from .timefmt import ts_to_str


@dataclass(frozen=True)
class PostContent:
    text: str
    media: tuple[str, ...] = ()  # hex digests of media bodies; bodies out of scope

    def canonical(self) -> dict:
        return {"media": list(self.media), "text": self.text}


def content_digest(content: PostContent) -> bytes:
    return digest(content.canonical())


@dataclass
class EvidenceSnapshot:
    snapshot_id: bytes  # 32-byte digest of canonical content bytes
    post_id: str
    author: str
    captured_at: datetime
    content: PostContent
    erased_at: Optional[datetime] = None

    def export(self) -> dict:
        """One JSON object per snapshot, digests hex-encoded lowercase."""
        return {
            "snapshot_id": self.snapshot_id.hex(),
            "post_id": self.post_id,
            "author": self.author,
            "captured_at": ts_to_str(self.captured_at),
            "content": self.content.canonical(),
            "erased_at": ts_to_str(self.erased_at) if self.erased_at else None,
        }


@dataclass(frozen=True)
class RetentionPolicy:
    retention_window: timedelta = timedelta(days=180)

    def __post_init__(self):
        if self.retention_window <= timedelta(0):
            raise ValueError("retention_window must be positive")


@dataclass(frozen=True)
class Tombstone:
    post_id: str
    erased_at: datetime
    purge_deadline: datetime


@dataclass
class _PostRecord:
    post_id: str
    author: str
    content: PostContent
    published_at: datetime
    erased_at: Optional[datetime] = None
    snapshot_ids: set[bytes] = field(default_factory=set)


class EvidenceVault:
    """Post store plus content-addressed snapshots with tombstone protection.

    Concurrent reads are fine; writes are serialized by an internal lock.
    ``pin_check`` (set by the platform wiring) answers whether a citing case is
    still open, which pins its snapshots past the purge deadline.
    """

    def __init__(self, policy: RetentionPolicy | None = None):
        self.policy = policy or RetentionPolicy()
        self._posts: dict[str, _PostRecord] = {}
        self._snapshots: dict[bytes, EvidenceSnapshot] = {}
        self._purged: set[bytes] = set()
        # snapshot_id -> set of citing report refs, and the reverse
        self._citations: dict[bytes, set[str]] = {}
        self._cited_by: dict[str, set[bytes]] = {}
        self.pin_check: Callable[[str], bool] | None = None
        self._lock = threading.RLock()

    # -- posts ---------------------------------------------------------------

    def publish_post(self, post_id: str, author: str, content: PostContent, now: datetime) -> None:
        with self._lock:
            if post_id in self._posts:
                raise ValueError(f"post {post_id} already exists")
            self._posts[post_id] = _PostRecord(post_id, author, content, now)

    def fetch_post(self, post_id: str) -> PostContent:
        """Normal feed access: never returns erased content."""
        record = self._posts.get(post_id)
        if record is None or record.erased_at is not None:
            raise NotFound(f"post {post_id} not found")
        return record.content

    def post_exists(self, post_id: str) -> bool:
        record = self._posts.get(post_id)
        return record is not None and record.erased_at is None

    def post_erased(self, post_id: str) -> bool:
        record = self._posts.get(post_id)
        return record is not None and record.erased_at is not None

    # -- snapshots -----------------------------------------------------------

    def snapshot_post(
        self, post_id: str, author: str, content: PostContent, now: datetime
    ) -> EvidenceSnapshot:
        """Capture a content-addressed snapshot; idempotent for identical content."""
        if not content.text and not content.media:
            raise EmptyContent("cannot snapshot empty content")
        with self._lock:
            snapshot_id = content_digest(content)
            existing = self._snapshots.get(snapshot_id)
            if existing is not None:
                return existing
            if post_id not in self._posts:
                self._posts[post_id] = _PostRecord(post_id, author, content, now)
            snapshot = EvidenceSnapshot(snapshot_id, post_id, author, now, content)
            record = self._posts[post_id]
            if record.erased_at is not None:
                snapshot.erased_at = record.erased_at
            self._snapshots[snapshot_id] = snapshot
            record.snapshot_ids.add(snapshot_id)
            return snapshot

    def snapshot_existing(self, post_id: str, now: datetime) -> EvidenceSnapshot:
        """Snapshot a registered post by id (report-time capture path).

        For an erased post this returns the erase-time snapshot rather than
        recapturing, keeping captured_at ≤ erased_at.
        """
        with self._lock:
            record = self._posts.get(post_id)
            if record is None:
                raise NotFound(f"post {post_id} not found")
            if record.erased_at is not None:
                deadline = record.erased_at + self.policy.retention_window
                if now >= deadline:
                    raise Purged(f"post {post_id} erased and past retention")
                snapshot_id = content_digest(record.content)
                snapshot = self._snapshots.get(snapshot_id)
                if snapshot is None:
                    raise Purged(f"post {post_id} snapshots already purged")
                return snapshot
            return self.snapshot_post(post_id, record.author, record.content, now)

    def erase_post(self, post_id: str, actor: str, now: datetime) -> Tombstone:
        """Hide a post from normal fetch; preserve its content as evidence.

        A snapshot is captured at erasure time (captured_at == erased_at) so a
        report filed later can still cite the content.
        """
        with self._lock:
            record = self._posts.get(post_id)
            if record is None:
                raise NotFound(f"post {post_id} not found")
            if record.erased_at is not None:
                raise AlreadyErased(f"post {post_id} already erased")
            self.snapshot_post(post_id, record.author, record.content, now)
            record.erased_at = now
            for snapshot_id in record.snapshot_ids:
                self._snapshots[snapshot_id].erased_at = now
            return Tombstone(post_id, now, now + self.policy.retention_window)

    # -- citation-gated access -----------------------------------------------

    def cite(self, report_ref: str, snapshot_ids: list[bytes]) -> None:
        """Register a filed report as a citer of the given snapshots."""
        with self._lock:
            for snapshot_id in snapshot_ids:
                if snapshot_id not in self._snapshots:
                    raise NotFound(f"snapshot {snapshot_id.hex()} not found")
                self._citations.setdefault(snapshot_id, set()).add(report_ref)
                self._cited_by.setdefault(report_ref, set()).add(snapshot_id)

    def snapshot_exists(self, snapshot_id: bytes) -> bool:
        return snapshot_id in self._snapshots

    def get_snapshot(self, snapshot_id: bytes) -> EvidenceSnapshot:
        snapshot = self._snapshots.get(snapshot_id)
        if snapshot is None:
            if snapshot_id in self._purged:
                raise Purged(f"snapshot {snapshot_id.hex()} purged")
            raise NotFound(f"snapshot {snapshot_id.hex()} not found")
        return snapshot

    def fetch_evidence(self, snapshot_id: bytes, report_ref: str, now: datetime) -> PostContent:
        """Return preserved content for a citing report, erased or not."""
        with self._lock:
            if snapshot_id in self._purged:
                raise Purged(f"snapshot {snapshot_id.hex()} purged")
            snapshot = self._snapshots.get(snapshot_id)
            if snapshot is None:
                raise NotFound(f"snapshot {snapshot_id.hex()} not found")
            if report_ref not in self._citations.get(snapshot_id, ()):
                raise UnreferencedAccess(
                    f"report {report_ref} does not cite snapshot {snapshot_id.hex()}"
                )
            if snapshot.erased_at is not None:
                deadline = snapshot.erased_at + self.policy.retention_window
                if not now < deadline and not self._pinned(snapshot_id):
                    raise Purged(f"snapshot {snapshot_id.hex()} past retention deadline")
            return snapshot.content

    def _pinned(self, snapshot_id: bytes) -> bool:
        if self.pin_check is None:
            return False
        return any(self.pin_check(ref) for ref in self._citations.get(snapshot_id, ()))

    def purge_expired(self, now: datetime) -> int:
        """Drop snapshots past their purge deadline; open cases pin theirs."""
        with self._lock:
            removed = 0
            for snapshot_id, snapshot in list(self._snapshots.items()):
                if snapshot.erased_at is None:
                    continue
                deadline = snapshot.erased_at + self.policy.retention_window
                if deadline < now and not self._pinned(snapshot_id):
                    del self._snapshots[snapshot_id]
                    self._purged.add(snapshot_id)
                    record = self._posts.get(snapshot.post_id)
                    if record is not None:
                        record.snapshot_ids.discard(snapshot_id)
                    removed += 1
            return removed

    # -- export --------------------------------------------------------------

    def export_snapshots(self) -> list[dict]:
        with self._lock:
            return [
                snapshot.export()
                for _, snapshot in sorted(self._snapshots.items(), key=lambda kv: kv[0].hex())
            ]

    def export_state(self) -> dict:
        with self._lock:
            return {
                "posts": {
                    post_id: {
                        "author": record.author,
                        "content": record.content.canonical(),
                        "published_at": ts_to_str(record.published_at),
                        "erased_at": ts_to_str(record.erased_at) if record.erased_at else None,
                        "snapshots": sorted(s.hex() for s in record.snapshot_ids),
                    }
                    for post_id, record in sorted(self._posts.items())
                },
                "snapshots": self.export_snapshots(),
                "purged": sorted(s.hex() for s in self._purged),
                "citations": {
                    ref: sorted(s.hex() for s in snaps)
                    for ref, snaps in sorted(self._cited_by.items())
                },
            }
