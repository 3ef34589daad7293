"""Clusters pseudonymous accounts through shared identity attributes and
alerts victims contacted by accounts linked to their past abusers.

Only salted digests of attribute values are ever stored; equality joins need
nothing more. There is no unlink: disputed merges are an operational matter.
"""

import hashlib
import threading
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Optional

from .timefmt import ts_to_str


class AttributeKind(Enum):
    PHONE = "Phone"
    EMAIL = "Email"
    PAYMENT_INSTRUMENT = "PaymentInstrument"
    DEVICE_FINGERPRINT = "DeviceFingerprint"


@dataclass(frozen=True)
class IdentityAttribute:
    kind: AttributeKind
    value_digest: bytes  # 32-byte salted hash; raw values never stored

    @classmethod
    def from_raw(cls, kind: AttributeKind, value: str, salt: bytes) -> "IdentityAttribute":
        material = salt + kind.value.encode() + b":" + value.encode("utf-8")
        return cls(kind, hashlib.sha256(material).digest())


@dataclass(frozen=True)
class AlertEvent:
    recipient: str
    sender: str
    linked_account: str  # the blocked/reported account sharing sender's cluster
    reason: str
    created_at: datetime

    def export(self) -> dict:
        return {
            "recipient": self.recipient,
            "sender": self.sender,
            "linked_account": self.linked_account,
            "reason": self.reason,
            "created_at": ts_to_str(self.created_at),
        }


class LinkageGraph:
    """Union-find over account ids keyed by shared attribute digests."""

    def __init__(self):
        self._parent: dict[str, str] = {}
        self._rank: dict[str, int] = {}
        # (kind, digest) -> first account seen with it
        self._attribute_owner: dict[tuple[AttributeKind, bytes], str] = {}
        self._attributes: dict[str, set[tuple[AttributeKind, bytes]]] = {}
        # recipient -> accounts they blocked or reported
        self._flagged: dict[str, set[str]] = {}
        self._lock = threading.RLock()

    def _find(self, account: str) -> str:
        parent = self._parent.setdefault(account, account)
        if parent == account:
            self._rank.setdefault(account, 0)
            return account
        root = self._find(parent)
        self._parent[account] = root
        return root

    def _union(self, a: str, b: str) -> None:
        ra, rb = self._find(a), self._find(b)
        if ra == rb:
            return
        if self._rank[ra] < self._rank[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        if self._rank[ra] == self._rank[rb]:
            self._rank[ra] += 1

    def record_attribute(self, account: str, attribute: IdentityAttribute) -> None:
        """Accounts sharing any attribute digest merge into one cluster."""
        with self._lock:
            self._find(account)
            key = (attribute.kind, attribute.value_digest)
            self._attributes.setdefault(account, set()).add(key)
            owner = self._attribute_owner.get(key)
            if owner is None:
                self._attribute_owner[key] = account
            else:
                self._union(owner, account)

    def cluster_of(self, account: str) -> str:
        """Canonical representative id; equal for linked accounts."""
        with self._lock:
            return self._find(account)

    def linked(self, a: str, b: str) -> bool:
        with self._lock:
            return self._find(a) == self._find(b)

    def cluster_members(self, account: str) -> set[str]:
        with self._lock:
            root = self._find(account)
            return {acct for acct in self._parent if self._find(acct) == root}

    # -- victim history and alerts --------------------------------------------

    def record_block(self, recipient: str, blocked: str) -> None:
        with self._lock:
            self._find(blocked)
            self._flagged.setdefault(recipient, set()).add(blocked)

    def record_report(self, reporter: str, accused: str) -> None:
        with self._lock:
            self._find(accused)
            self._flagged.setdefault(reporter, set()).add(accused)

    def flagged_by(self, recipient: str) -> set[str]:
        return set(self._flagged.get(recipient, ()))

    def should_alert(self, recipient: str, sender: str, now: datetime) -> Optional[AlertEvent]:
        """Alert iff the sender's cluster holds an account this recipient
        previously blocked or reported."""
        with self._lock:
            flagged = self._flagged.get(recipient)
            if not flagged:
                return None
            sender_root = self._find(sender)
            for account in sorted(flagged):
                if self._find(account) == sender_root:
                    return AlertEvent(
                        recipient=recipient,
                        sender=sender,
                        linked_account=account,
                        reason="sender shares identity attributes with an account you blocked or reported",
                        created_at=now,
                    )
            return None

    def export_state(self) -> dict:
        with self._lock:
            clusters: dict[str, list[str]] = {}
            for account in self._parent:
                clusters.setdefault(self._find(account), []).append(account)
            return {
                "clusters": {root: sorted(members) for root, members in sorted(clusters.items())},
                "attributes": {
                    account: sorted(f"{kind.value}:{digest.hex()}" for kind, digest in attrs)
                    for account, attrs in sorted(self._attributes.items())
                },
                "flagged": {user: sorted(accts) for user, accts in sorted(self._flagged.items())},
            }
