"""Wires the modules into one platform: accounts, posts, reports, ballots,
messaging with sockpuppet alerts, and the audit log.

Every externally triggered operation is a *command*: it is appended to the
event log and then executed, so replaying a log through a fresh platform with
the same config reconstructs the full state. Records emitted during execution
(ledger entries, case events, alerts) are derived and regenerate on replay.
"""

import hashlib
import threading
from dataclasses import dataclass, field
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .attest import SigningKey
from .cases import AbuseCategory, CaseEngine
from .crowd import AggregationPolicy, VerifierProfile
from .errors import AccountFrozen, NotFound, PoolTooSmall, RedressError
from .eventlog import EventLog, EventRecord
from .guard import Guard, RateLimitPolicy
from .ledger import EscrowLedger, PenaltySchedule
from .linkage import AlertEvent, AttributeKind, IdentityAttribute, LinkageGraph
from .timefmt import str_to_ts, ts_to_str
from .vault import EvidenceVault, PostContent, RetentionPolicy


@dataclass
class Account:
    account_id: str
    handle: str
    display_name: str
    created_at: datetime
    special_status: bool = False

    def export(self) -> dict:
        return {
            "account_id": self.account_id,
            "handle": self.handle,
            "display_name": self.display_name,
            "created_at": ts_to_str(self.created_at),
            "special_status": self.special_status,
        }


@dataclass
class PlatformConfig:
    aggregation: AggregationPolicy = field(default_factory=AggregationPolicy)
    penalty: PenaltySchedule = field(default_factory=PenaltySchedule)
    rate_limit: RateLimitPolicy = field(default_factory=RateLimitPolicy)
    retention: RetentionPolicy = field(default_factory=RetentionPolicy)
    signing_seed: int = 0  # key derived from seed unless key_bytes given
    signing_key_bytes: Optional[bytes] = None
    attribute_salt: bytes = b"redress-dev-salt"
    admins: set[str] = field(default_factory=lambda: {"admin"})
    dispatch_seed: int = 0  # base for auto-generated verifier-selection seeds

    def make_signing_key(self) -> SigningKey:
        if self.signing_key_bytes is not None:
            return SigningKey(self.signing_key_bytes)
        return SigningKey.from_seed(self.signing_seed)


class Platform:
    """One lock serializes mutating commands; reads take consistent snapshots."""

    def __init__(self, config: PlatformConfig | None = None, log: EventLog | None = None):
        self.config = config or PlatformConfig()
        self.log = log if log is not None else EventLog()  # empty logs are falsy
        self.signing_key = self.config.make_signing_key()
        self.vault = EvidenceVault(self.config.retention)
        self.ledger = EscrowLedger(self.config.penalty)
        self.guard = Guard(self.config.rate_limit, balance_of=self.ledger.wallet_balance)
        self.linkage = LinkageGraph()
        self.accounts: dict[str, Account] = {}
        self.directory: dict[str, tuple[str, str]] = {}
        self.engine = CaseEngine(
            vault=self.vault,
            ledger=self.ledger,
            guard=self.guard,
            linkage=self.linkage,
            signing_key=self.signing_key,
            policy=self.config.aggregation,
            directory=self.directory,
            admins=self.config.admins,
        )
        self.alerts: list[AlertEvent] = []
        self._seed_counter = 0
        self._current_ts = "1970-01-01T00:00:00Z"
        self._suspend_log = False
        self._lock = threading.RLock()

        self.ledger.entry_sink = lambda entry: self._emit("ledger", "entry", entry.export())
        self.engine.on_event = lambda kind, detail: self._emit("case", kind, detail)

    # -- logging ------------------------------------------------------------------

    def _emit(self, module: str, kind: str, payload: dict) -> None:
        if self._suspend_log:
            return
        self.log.append(self._current_ts, module, kind, payload)

    def _command(self, kind: str, payload: dict, now: datetime):
        """Append the command, then execute it; failures replay identically."""
        with self._lock:
            self._current_ts = ts_to_str(now)
            if not self._suspend_log:
                self.log.append(self._current_ts, "platform", kind, payload)
            return self._apply(kind, payload, now)

    def recover(self) -> None:
        """Rebuild state from the commands already in this platform's log.

        Used at service startup over a pre-existing log file: commands are
        re-applied without re-appending anything.
        """
        with self._lock:
            self._suspend_log = True
            try:
                for record in list(self.log.records):
                    if record.module != COMMAND_MODULE:
                        continue
                    self._current_ts = record.ts
                    try:
                        self._apply(record.kind, record.payload, str_to_ts(record.ts))
                    except (RedressError, ValueError):
                        pass
            finally:
                self._suspend_log = False

    def _apply(self, kind: str, payload: dict, now: datetime):
        handler = getattr(self, f"_do_{kind}")
        return handler(payload, now)

    # -- account commands ------------------------------------------------------------

    def register_account(
        self,
        account_id: str,
        handle: str,
        display_name: str,
        now: datetime,
        special_status: bool = False,
    ) -> Account:
        return self._command(
            "register_account",
            {
                "account_id": account_id,
                "handle": handle,
                "display_name": display_name,
                "special_status": special_status,
            },
            now,
        )

    def _do_register_account(self, p: dict, now: datetime) -> Account:
        if p["account_id"] in self.accounts:
            raise ValueError(f"account {p['account_id']} already registered")
        account = Account(p["account_id"], p["handle"], p["display_name"], now, p["special_status"])
        self.accounts[account.account_id] = account
        self.directory[account.account_id] = (account.handle, account.display_name)
        if account.special_status:
            self.ledger.set_special_status(account.account_id, True)
        return account

    def register_verifier(
        self, account_id: str, now: datetime, qualified_since: datetime | None = None
    ) -> VerifierProfile:
        return self._command(
            "register_verifier",
            {
                "account_id": account_id,
                "qualified_since": ts_to_str(qualified_since or now),
            },
            now,
        )

    def _do_register_verifier(self, p: dict, now: datetime) -> VerifierProfile:
        profile = VerifierProfile(
            verifier=p["account_id"], qualified_since=str_to_ts(p["qualified_since"])
        )
        self.engine.register_verifier(profile)
        return profile

    def fund_wallet(self, account_id: str, amount: int, now: datetime) -> None:
        self._command("fund_wallet", {"account_id": account_id, "amount": amount}, now)

    def _do_fund_wallet(self, p: dict, now: datetime) -> None:
        self.ledger.fund_wallet(p["account_id"], p["amount"], now)

    # -- content commands ----------------------------------------------------------------

    def publish_post(
        self, post_id: str, author: str, text: str, now: datetime, media: list[str] | None = None
    ) -> None:
        if self.guard.is_frozen(author):
            raise AccountFrozen(f"account {author} is frozen pending payment")
        self._command(
            "publish_post",
            {"post_id": post_id, "author": author, "text": text, "media": media or []},
            now,
        )

    def _do_publish_post(self, p: dict, now: datetime) -> None:
        content = PostContent(text=p["text"], media=tuple(p["media"]))
        self.vault.publish_post(p["post_id"], p["author"], content, now)

    def erase_post(self, post_id: str, actor: str, now: datetime):
        return self._command("erase_post", {"post_id": post_id, "actor": actor}, now)

    def _do_erase_post(self, p: dict, now: datetime):
        return self.vault.erase_post(p["post_id"], p["actor"], now)

    def block(self, recipient: str, blocked: str, now: datetime) -> None:
        self._command("block", {"recipient": recipient, "blocked": blocked}, now)

    def _do_block(self, p: dict, now: datetime) -> None:
        self.linkage.record_block(p["recipient"], p["blocked"])

    def contact(self, sender: str, recipient: str, now: datetime) -> Optional[AlertEvent]:
        """Direct contact attempt; returns the sockpuppet alert if one fires."""
        if self.guard.is_frozen(sender):
            raise AccountFrozen(f"account {sender} is frozen pending payment")
        return self._command("contact", {"sender": sender, "recipient": recipient}, now)

    def _do_contact(self, p: dict, now: datetime) -> Optional[AlertEvent]:
        if p["sender"] in self.linkage.flagged_by(p["recipient"]):
            return None  # blocked directly; nothing delivered, nothing to alert
        alert = self.linkage.should_alert(p["recipient"], p["sender"], now)
        if alert is not None:
            self.alerts.append(alert)
            self._emit("linkage", "alert", alert.export())
        return alert

    def record_attribute(
        self, account_id: str, kind: AttributeKind, value_digest: bytes, now: datetime
    ) -> None:
        self._command(
            "record_attribute",
            {"account_id": account_id, "kind": kind.value, "value_digest": value_digest.hex()},
            now,
        )

    def _do_record_attribute(self, p: dict, now: datetime) -> None:
        attribute = IdentityAttribute(AttributeKind(p["kind"]), bytes.fromhex(p["value_digest"]))
        self.linkage.record_attribute(p["account_id"], attribute)

    def attribute_from_raw(self, kind: AttributeKind, value: str) -> IdentityAttribute:
        return IdentityAttribute.from_raw(kind, value, self.config.attribute_salt)

    # -- report commands -------------------------------------------------------------------

    def file_report(
        self,
        reporter: str,
        accused: str,
        category: AbuseCategory,
        narrative: str,
        post_ids: list[str],
        now: datetime,
        rng_seed: int | None = None,
    ):
        """Snapshot the cited posts, file the case, and dispatch verification."""
        if rng_seed is None:
            rng_seed = self._next_seed()
        return self._command(
            "file_report",
            {
                "reporter": reporter,
                "accused": accused,
                "category": category.value,
                "narrative": narrative,
                "post_ids": list(post_ids),
                "rng_seed": rng_seed,
            },
            now,
        )

    def _do_file_report(self, p: dict, now: datetime):
        evidence = [
            self.vault.snapshot_existing(post_id, now).snapshot_id for post_id in p["post_ids"]
        ]
        case, ack = self.engine.file_report(
            p["reporter"],
            p["accused"],
            AbuseCategory(p["category"]),
            p["narrative"],
            evidence,
            now,
        )
        self._dispatch(case.case_id, p["rng_seed"], now)
        return case, ack

    def _dispatch(self, case_id: str, rng_seed: int, now: datetime) -> None:
        try:
            self.engine.begin_verification(case_id, rng_seed, now)
        except PoolTooSmall:
            pass  # stays Filed; retried on tick

    def _next_seed(self) -> int:
        self._seed_counter += 1
        material = f"{self.config.dispatch_seed}:{self._seed_counter}".encode()
        return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")

    def submit_ballot(
        self,
        case_id: str,
        verifier: str,
        verdict: bool,
        impact: int,
        bad_faith: bool,
        now: datetime,
    ):
        if self.guard.is_frozen(verifier):
            raise AccountFrozen(f"account {verifier} is frozen pending payment")
        return self._command(
            "submit_ballot",
            {
                "case_id": case_id,
                "verifier": verifier,
                "verdict": verdict,
                "impact": impact,
                "bad_faith": bad_faith,
            },
            now,
        )

    def _do_submit_ballot(self, p: dict, now: datetime):
        return self.engine.submit_ballot(
            p["case_id"], p["verifier"], p["verdict"], p["impact"], p["bad_faith"], now
        )

    def tick(self, now: datetime) -> None:
        """Advance housekeeping: deadlines plus re-dispatch of stuck filings."""
        self._command("tick", {}, now)

    def _do_tick(self, p: dict, now: datetime) -> None:
        self.engine.tick(now)
        for case_id, case in list(self.engine.cases.items()):
            if case.state.value == "Filed":
                material = f"redispatch:{case_id}:{ts_to_str(now)}".encode()
                seed = int.from_bytes(hashlib.sha256(material).digest()[:8], "big")
                self._dispatch(case_id, seed, now)

    def maybe_tick_for_case(self, case_id: str, now: datetime) -> None:
        """Issue a logged tick iff this case has a lapsed deadline to process.

        Keeps read paths pure: deadline resolution always enters the log as a
        tick command, so recovery and replay see it.
        """
        case = self.engine.cases.get(case_id)
        assignment = case.assignment if case else None
        if (
            case is not None
            and assignment is not None
            and case.state.value in ("UnderVerification", "Escalated")
            and now > assignment.deadline
        ):
            self.tick(now)

    def purge_expired(self, now: datetime) -> int:
        return self._command("purge_expired", {}, now)

    def _do_purge_expired(self, p: dict, now: datetime) -> int:
        return self.vault.purge_expired(now)

    # -- queries (no log records) ------------------------------------------------------------

    def progress(self, case_id: str, requester: str):
        return self.engine.progress(case_id, requester)

    def redacted_view(self, case_id: str, now: datetime):
        return self.engine.redacted_view(case_id, now)

    def alerts_for(self, recipient: str) -> list[AlertEvent]:
        return [a for a in self.alerts if a.recipient == recipient]

    def assignments_for(self, verifier: str, now: datetime) -> list[str]:
        """Case ids with an open, unvoted assignment for this verifier."""
        case_ids = []
        for case in self.engine.cases.values():
            assignment = case.assignment
            if (
                case.state.value in ("UnderVerification", "Escalated")
                and assignment is not None
                and verifier in assignment.verifiers
                and now <= assignment.deadline
                and all(b.verifier != verifier for b in case.ballots)
            ):
                case_ids.append(case.case_id)
        return sorted(case_ids)

    def queue_for(self, verifier: str, now: datetime) -> list[dict]:
        """Open assignments for a verifier: redacted view plus the deadline."""
        items = []
        for case_id in self.assignments_for(verifier, now):
            case = self.engine.cases[case_id]
            view = self.engine.redacted_view(case_id, now).export()
            items.append({**view, "deadline": ts_to_str(case.assignment.deadline)})
        return items

    def metrics(self, now: datetime) -> dict:
        """Counter snapshot; evidence recoveries judged against ``now``."""
        recoveries = 0
        for case in self.engine.cases.values():
            cited_posts = {self.vault.get_snapshot(s).post_id for s in case.evidence if self.vault.snapshot_exists(s)}
            if not cited_posts or not any(self.vault.post_erased(pid) for pid in cited_posts):
                continue
            try:
                for snapshot_id in case.evidence:
                    self.vault.fetch_evidence(snapshot_id, case.case_id, now)
            except RedressError:
                continue
            recoveries += 1
        return {
            "reports_filed": len(self.engine.cases),
            "certificates_issued": len(self.engine.certificates),
            "bad_faith_forfeits": self.guard.total_forfeits(),
            "alerts_emitted": len(self.alerts),
            "evidence_recoveries": recoveries,
            "ledger_trial_balance": self.ledger.trial_balance(),
        }

    def export_state(self) -> dict:
        with self._lock:
            return {
                "accounts": {aid: acct.export() for aid, acct in sorted(self.accounts.items())},
                "vault": self.vault.export_state(),
                "ledger": self.ledger.export_state(),
                "linkage": self.linkage.export_state(),
                "guard": self.guard.export_state(),
                "engine": self.engine.export_state(),
                "alerts": [a.export() for a in self.alerts],
            }


COMMAND_MODULE = "platform"


def replay(records: list[EventRecord], config: PlatformConfig | None = None) -> Platform:
    """Re-execute the command records through a fresh platform.

    Derived records regenerate; deterministic failures (rate limits, refused
    ballots) re-fail identically and are swallowed just as the original caller
    swallowed them. The result's export_state() deep-equals the original's.
    """
    platform = Platform(config=config)
    for record in records:
        if record.module != COMMAND_MODULE:
            continue
        try:
            platform._command(record.kind, record.payload, str_to_ts(record.ts))
        except RedressError:
            pass
        except ValueError:
            pass
    return platform


def replay_file(path, config: PlatformConfig | None = None) -> Platform:
    from .eventlog import read_records

    return replay(read_records(path), config)
