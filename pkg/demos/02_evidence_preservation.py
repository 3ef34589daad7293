"""Walkthrough: hit-and-run erasure and why it no longer works.

An abuser deletes the post right after sending it. Normal readers see nothing,
but the vault preserved the content at erasure time, so a report filed later
can still cite it — for a 180-day window, or longer while a case stays open.
"""

from datetime import datetime, timedelta, timezone

from redress import EvidenceVault, PostContent, RetentionPolicy
from redress.errors import NotFound, Purged

t0 = datetime(2025, 1, 1, tzinfo=timezone.utc)
day = timedelta(days=1)
vault = EvidenceVault(RetentionPolicy(retention_window=timedelta(days=180)))

vault.publish_post("post-1", "mallory", PostContent("pay up or I leak your photos"), t0)
vault.erase_post("post-1", "mallory", t0 + day)  # abuser covers their tracks

try:
    vault.fetch_post("post-1")
except NotFound:
    print("normal access after erasure: NotFound (as every other reader sees)")

# the victim files three days later, citing the erased post
snapshot = vault.snapshot_existing("post-1", t0 + 3 * day)
vault.cite("case-000001", [snapshot.snapshot_id])
content = vault.fetch_evidence(snapshot.snapshot_id, "case-000001", t0 + 30 * day)
print("evidence fetched through the citing report:", repr(content.text))

# snapshots are content-addressed: identical content, identical id
again = vault.snapshot_existing("post-1", t0 + 4 * day)
print("content addressing is stable:", again.snapshot_id == snapshot.snapshot_id)

# non-citing callers are refused
try:
    vault.fetch_evidence(snapshot.snapshot_id, "case-other", t0 + 30 * day)
except Exception as exc:
    print("non-citing caller:", type(exc).__name__)

# the retention window is strict: erased at t0+1d, purge after t0+181d
deadline = t0 + day + 180 * day
print("purge at the deadline removes:", vault.purge_expired(deadline))
print("purge one second later removes:", vault.purge_expired(deadline + timedelta(seconds=1)))
try:
    vault.fetch_evidence(snapshot.snapshot_id, "case-000001", deadline + timedelta(seconds=2))
except Purged:
    print("after the window: Purged")
