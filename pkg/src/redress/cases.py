"""Abuse-report lifecycle: filing with fee escrow and a signed receipt,
dispatch to a verifier crowd, deadline handling with one bounded escalation,
settlement against the ledger, and certificate issuance.

State graph::

    Filed -> UnderVerification -> {Validated, RejectedGoodFaith,
                                   RejectedBadFaith, Escalated, Inconclusive}
    Escalated -> {Validated, RejectedGoodFaith, RejectedBadFaith, Inconclusive}
    {Validated, RejectedGoodFaith, RejectedBadFaith, Inconclusive} -> Settled

Settlement table: Validated refunds the reporter, charges the abuser the
escalating penalty (freezing them while in debt) and issues a certificate;
a bad-faith rejection forfeits the fee to platform + verifier pool; a
good-faith rejection or inconclusive outcome refunds without a certificate.
Verifiers are paid equal shares on every path.
"""

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Callable, Optional

from . import attest
from .attest import AbuseCertificate, SignedAcknowledgement, SigningKey
from .crowd import (
    AggregateOutcome,
    AggregationPolicy,
    Ballot,
    Decision,
    RedactedView,
    VerifierProfile,
    aggregate,
    anonymize_texts,
    check_impact,
    select_verifiers,
    update_reliability,
)
from .errors import (
    AccountFrozen,
    DuplicateBallot,
    Forbidden,
    InsufficientFunds,
    NoEvidence,
    NotAssigned,
    NotFound,
    PastDeadline,
    PoolTooSmall,
    UnknownSnapshot,
    WrongState,
)
from .guard import Guard
from .ledger import EscrowLedger
from .linkage import LinkageGraph
from .timefmt import ts_to_str
from .vault import EvidenceVault


class AbuseCategory(Enum):
    THREAT = "Threat"
    ABUSIVE_MESSAGE = "AbusiveMessage"
    DOXXING = "Doxxing"
    BLACKMAIL = "Blackmail"
    HARASSMENT = "Harassment"
    HATE_SPEECH = "HateSpeech"


class CaseState(Enum):
    FILED = "Filed"
    UNDER_VERIFICATION = "UnderVerification"
    ESCALATED = "Escalated"
    VALIDATED = "Validated"
    REJECTED_GOOD_FAITH = "RejectedGoodFaith"
    REJECTED_BAD_FAITH = "RejectedBadFaith"
    INCONCLUSIVE = "Inconclusive"
    SETTLED = "Settled"


_TERMINAL_DECISIONS = frozenset(
    {
        CaseState.VALIDATED,
        CaseState.REJECTED_GOOD_FAITH,
        CaseState.REJECTED_BAD_FAITH,
        CaseState.INCONCLUSIVE,
    }
)

_TRANSITIONS: dict[CaseState, frozenset[CaseState]] = {
    CaseState.FILED: frozenset({CaseState.UNDER_VERIFICATION}),
    CaseState.UNDER_VERIFICATION: frozenset(
        {
            CaseState.VALIDATED,
            CaseState.REJECTED_GOOD_FAITH,
            CaseState.REJECTED_BAD_FAITH,
            CaseState.ESCALATED,
            CaseState.INCONCLUSIVE,
        }
    ),
    CaseState.ESCALATED: frozenset(
        {
            CaseState.VALIDATED,
            CaseState.REJECTED_GOOD_FAITH,
            CaseState.REJECTED_BAD_FAITH,
            CaseState.INCONCLUSIVE,
        }
    ),
    CaseState.VALIDATED: frozenset({CaseState.SETTLED}),
    CaseState.REJECTED_GOOD_FAITH: frozenset({CaseState.SETTLED}),
    CaseState.REJECTED_BAD_FAITH: frozenset({CaseState.SETTLED}),
    CaseState.INCONCLUSIVE: frozenset({CaseState.SETTLED}),
    CaseState.SETTLED: frozenset(),
}

_DECISION_STATE = {
    Decision.VALIDATED: CaseState.VALIDATED,
    Decision.REJECTED_GOOD_FAITH: CaseState.REJECTED_GOOD_FAITH,
    Decision.REJECTED_BAD_FAITH: CaseState.REJECTED_BAD_FAITH,
}


_ACTIVE_STATES = (CaseState.UNDER_VERIFICATION, CaseState.ESCALATED)


def allowed_transitions(state: CaseState) -> frozenset[CaseState]:
    return _TRANSITIONS[state]


@dataclass
class CaseEvent:
    at: datetime
    kind: str
    detail: dict

    def export(self) -> dict:
        return {"at": ts_to_str(self.at), "kind": self.kind, "detail": self.detail}


@dataclass
class Assignment:
    round: int
    verifiers: list[str]
    deadline: datetime


@dataclass
class ReportCase:
    case_id: str
    reporter: str
    accused: str
    category: AbuseCategory
    narrative: str
    evidence: list[bytes]  # snapshot ids, non-empty
    filed_at: datetime
    state: CaseState = CaseState.FILED
    escrow_ref: Optional[str] = None
    ballots: list[Ballot] = field(default_factory=list)
    outcome: Optional[AggregateOutcome] = None
    events: list[CaseEvent] = field(default_factory=list)
    rounds: list[Assignment] = field(default_factory=list)
    certificate_id: Optional[str] = None

    @property
    def assignment(self) -> Optional[Assignment]:
        return self.rounds[-1] if self.rounds else None

    def assigned(self) -> set[str]:
        return {v for rnd in self.rounds for v in rnd.verifiers}

    def export(self, include_verifier_ids: bool = True) -> dict:
        return {
            "case_id": self.case_id,
            "reporter": self.reporter,
            "accused": self.accused,
            "category": self.category.value,
            "narrative": self.narrative,
            "evidence": [e.hex() for e in self.evidence],
            "filed_at": ts_to_str(self.filed_at),
            "state": self.state.value,
            "escrow_ref": self.escrow_ref,
            "ballots": [
                {
                    "verifier": b.verifier if include_verifier_ids else "[redacted]",
                    "verdict": b.verdict,
                    "impact": b.impact,
                    "bad_faith": b.bad_faith,
                    "submitted_at": ts_to_str(b.submitted_at),
                }
                for b in self.ballots
            ],
            "outcome": self.outcome.export() if self.outcome else None,
            "events": [e.export() for e in self.events],
            "rounds": [
                {
                    "round": rnd.round,
                    "verifiers": list(rnd.verifiers) if include_verifier_ids else len(rnd.verifiers),
                    "deadline": ts_to_str(rnd.deadline),
                }
                for rnd in self.rounds
            ],
            "certificate_id": self.certificate_id,
        }


@dataclass
class ProgressView:
    case_id: str
    state: CaseState
    events: list[CaseEvent]
    ballots_received: int
    ballots_expected: int
    deadline: Optional[datetime]

    def export(self) -> dict:
        return {
            "case_id": self.case_id,
            "state": self.state.value,
            "events": [e.export() for e in self.events],
            "ballots_received": self.ballots_received,
            "ballots_expected": self.ballots_expected,
            "deadline": ts_to_str(self.deadline) if self.deadline else None,
        }


class CaseEngine:
    """Owns cases and drives them from filing to settlement.

    Per-case operations are serialized by the caller (the platform holds one
    lock); the engine itself is deterministic given inputs and rng seeds.
    ``on_event`` receives derived records for the audit log.
    """

    def __init__(
        self,
        vault: EvidenceVault,
        ledger: EscrowLedger,
        guard: Guard,
        linkage: LinkageGraph,
        signing_key: SigningKey,
        policy: AggregationPolicy | None = None,
        directory: dict[str, tuple[str, str]] | None = None,
        admins: set[str] | None = None,
    ):
        self.vault = vault
        self.ledger = ledger
        self.guard = guard
        self.linkage = linkage
        self.signing_key = signing_key
        self.policy = policy or AggregationPolicy()
        self.directory = directory if directory is not None else {}
        self.admins = admins or set()
        self.cases: dict[str, ReportCase] = {}
        self.profiles: dict[str, VerifierProfile] = {}
        self.acks: dict[str, SignedAcknowledgement] = {}
        self.certificates: dict[str, AbuseCertificate] = {}
        self._case_seq = 0
        self._cert_seq = 0
        self.on_event: Callable[[str, dict], None] | None = None
        vault.pin_check = self.case_open

    # -- helpers ---------------------------------------------------------------

    def case_open(self, case_id: str) -> bool:
        case = self.cases.get(case_id)
        return case is not None and case.state is not CaseState.SETTLED

    def _get(self, case_id: str) -> ReportCase:
        case = self.cases.get(case_id)
        if case is None:
            raise NotFound(f"case {case_id} not found")
        return case

    def _emit(self, case: ReportCase, kind: str, detail: dict, now: datetime) -> None:
        case.events.append(CaseEvent(now, kind, detail))
        if self.on_event is not None:
            self.on_event(kind, {"case_id": case.case_id, **detail})

    def _transition(self, case: ReportCase, target: CaseState, now: datetime) -> None:
        if target not in _TRANSITIONS[case.state]:
            raise WrongState(f"cannot move {case.case_id} from {case.state.value} to {target.value}")
        case.state = target
        self._emit(case, "state_changed", {"state": target.value}, now)

    def register_verifier(self, profile: VerifierProfile) -> None:
        self.profiles[profile.verifier] = profile

    # -- filing ------------------------------------------------------------------

    def filing_document(self, case: ReportCase) -> dict:
        """Canonical filing content whose digest goes into the acknowledgement."""
        return {
            "case_id": case.case_id,
            "reporter": case.reporter,
            "accused": case.accused,
            "category": case.category.value,
            "narrative": case.narrative,
            "evidence": [e.hex() for e in case.evidence],
            "filed_at": ts_to_str(case.filed_at),
        }

    def file_report(
        self,
        reporter: str,
        accused: str,
        category: AbuseCategory,
        narrative: str,
        evidence: list[bytes],
        now: datetime,
    ) -> tuple[ReportCase, SignedAcknowledgement]:
        """File a report: rate-limit and freeze checks, fee escrow, signed receipt."""
        if not evidence:
            raise NoEvidence("a report must cite at least one post")
        for snapshot_id in evidence:
            if not self.vault.snapshot_exists(snapshot_id):
                raise UnknownSnapshot(f"snapshot {snapshot_id.hex()} not found")
        if self.guard.is_frozen(reporter):
            raise AccountFrozen(f"account {reporter} is frozen pending payment")
        fee = 0
        if not self.ledger.is_exempt(reporter):
            fee = self.guard.adjusted_fee(reporter, self.ledger.schedule.base_fee)
        if self.ledger.wallet_balance(reporter) < fee:
            raise InsufficientFunds(f"filing fee is {fee}")
        self.guard.check_and_consume(reporter, now)

        self._case_seq += 1
        case = ReportCase(
            case_id=f"case-{self._case_seq:06d}",
            reporter=reporter,
            accused=accused,
            category=category,
            narrative=narrative,
            evidence=list(evidence),
            filed_at=now,
        )
        case.escrow_ref = self.ledger.hold_fee(reporter, case.case_id, fee, now)
        self.cases[case.case_id] = case
        self.vault.cite(case.case_id, case.evidence)
        self.linkage.record_report(reporter, accused)
        ack = attest.issue_ack(case.case_id, self.filing_document(case), now, self.signing_key)
        self.acks[case.case_id] = ack
        self._emit(
            case,
            "filed",
            {
                "reporter": reporter,
                "accused": accused,
                "category": category.value,
                "fee": fee,
                "ack_digest": ack.report_digest.hex(),
            },
            now,
        )
        return case, ack

    # -- verification ---------------------------------------------------------------

    def begin_verification(
        self,
        case_id: str,
        rng_seed: int,
        now: datetime,
        pool: list[VerifierProfile] | None = None,
    ) -> Assignment:
        case = self._get(case_id)
        if case.state is not CaseState.FILED:
            raise WrongState(f"case {case_id} is {case.state.value}, expected Filed")
        verifiers = select_verifiers(
            pool if pool is not None else list(self.profiles.values()),
            case.reporter,
            case.accused,
            self.policy.k,
            rng_seed,
            now,
            cluster_of=self.linkage.cluster_of,
        )
        self._transition(case, CaseState.UNDER_VERIFICATION, now)
        assignment = Assignment(round=1, verifiers=verifiers, deadline=now + self.policy.deadline)
        case.rounds.append(assignment)
        self._emit(
            case,
            "verification_started",
            {"verifiers": len(verifiers), "deadline": ts_to_str(assignment.deadline)},
            now,
        )
        return assignment

    def redacted_view(self, case_id: str, now: datetime) -> RedactedView:
        """Anonymized view a verifier sees: role tokens instead of identities."""
        case = self._get(case_id)
        texts = [case.narrative]
        for snapshot_id in case.evidence:
            texts.append(self.vault.fetch_evidence(snapshot_id, case.case_id, now).text)
        redacted = anonymize_texts(texts, case.reporter, case.accused, self.directory)
        return RedactedView(
            case_id=case.case_id,
            category=case.category.value,
            redacted_narrative=redacted[0],
            redacted_evidence=redacted[1:],
        )

    def submit_ballot(
        self,
        case_id: str,
        verifier: str,
        verdict: bool,
        impact: int,
        bad_faith: bool,
        now: datetime,
    ) -> ReportCase:
        check_impact(impact)
        case = self._get(case_id)
        late_for = None
        if (
            case.state in _ACTIVE_STATES
            and case.assignment is not None
            and now > case.assignment.deadline
        ):
            late_for = case.assignment
            self.process_due(case_id, now)
        if late_for is not None and verifier in late_for.verifiers:
            raise PastDeadline(f"deadline for case {case_id} round {late_for.round} has passed")
        if case.state not in _ACTIVE_STATES:
            raise WrongState(f"case {case_id} is not accepting ballots")
        assignment = case.assignment
        if assignment is None or verifier not in assignment.verifiers:
            raise NotAssigned(f"{verifier} is not assigned to case {case_id}")
        if any(b.verifier == verifier for b in case.ballots):
            raise DuplicateBallot(f"{verifier} already voted on case {case_id}")
        ballot = Ballot(verifier, verdict, impact, bad_faith, now)
        case.ballots.append(ballot)
        self._emit(
            case,
            "ballot_received",
            {"count": len(case.ballots), "expected": len(case.assigned())},
            now,
        )
        round_voters = {b.verifier for b in case.ballots}
        if all(v in round_voters for v in assignment.verifiers):
            self._resolve(case, now)
        return case

    def process_due(self, case_id: str, now: datetime) -> None:
        """Deadline passage: drop missing ballots and resolve with what came."""
        case = self._get(case_id)
        assignment = case.assignment
        if (
            case.state in _ACTIVE_STATES
            and assignment is not None
            and now > assignment.deadline
        ):
            self._emit(case, "deadline_passed", {"round": assignment.round}, now)
            self._resolve(case, now)

    def tick(self, now: datetime) -> None:
        for case_id in list(self.cases):
            self.process_due(case_id, now)

    def _resolve(self, case: ReportCase, now: datetime) -> None:
        """Aggregate current ballots; escalate once on tie or missing quorum."""
        first_round = case.state is CaseState.UNDER_VERIFICATION
        if len(case.ballots) < self.policy.quorum:
            if first_round:
                self._escalate(case, now, reason="below_quorum")
            else:
                self._conclude_inconclusive(case, now)
            return
        outcome = aggregate(case.ballots, self.policy, self.profiles)
        if outcome.decision is Decision.TIE:
            if first_round:
                self._escalate(case, now, reason="tie")
            else:
                self._conclude_inconclusive(case, now, outcome)
            return
        self.conclude(case.case_id, outcome, now)

    def _escalate(self, case: ReportCase, now: datetime, reason: str) -> None:
        try:
            fresh = select_verifiers(
                list(self.profiles.values()),
                case.reporter,
                case.accused,
                self.policy.k,
                rng_seed=self._escalation_seed(case),
                now=now,
                cluster_of=self.linkage.cluster_of,
                exclude=case.assigned(),
            )
        except PoolTooSmall:
            # no fresh verifiers to add: resolve rather than stall
            self._conclude_inconclusive(case, now)
            return
        self._transition(case, CaseState.ESCALATED, now)
        assignment = Assignment(round=2, verifiers=fresh, deadline=now + self.policy.deadline)
        case.rounds.append(assignment)
        self._emit(
            case,
            "escalated",
            {"reason": reason, "verifiers": len(fresh), "deadline": ts_to_str(assignment.deadline)},
            now,
        )

    def _escalation_seed(self, case: ReportCase) -> int:
        # deterministic per case; independent of wall clock
        return int.from_bytes(
            attest.digest({"case_id": case.case_id, "purpose": "escalation"})[:8], "big"
        )

    def _conclude_inconclusive(
        self, case: ReportCase, now: datetime, outcome: AggregateOutcome | None = None
    ) -> None:
        self._transition(case, CaseState.INCONCLUSIVE, now)
        case.outcome = outcome
        self._settle(case, now)

    # -- settlement -------------------------------------------------------------------

    def conclude(self, case_id: str, outcome: AggregateOutcome, now: datetime) -> ReportCase:
        """Apply an aggregation outcome: transition, settle money, certify."""
        case = self._get(case_id)
        if case.state not in (CaseState.UNDER_VERIFICATION, CaseState.ESCALATED):
            raise WrongState(f"case {case_id} is {case.state.value}")
        if outcome.decision is Decision.TIE:
            raise WrongState("ties escalate or resolve inconclusive; conclude takes a decision")
        case.outcome = outcome
        self._transition(case, _DECISION_STATE[outcome.decision], now)
        self._settle(case, now)
        return case

    def _settle(self, case: ReportCase, now: datetime) -> None:
        decision_state = case.state
        if decision_state is CaseState.VALIDATED:
            self.ledger.release_refund(case.case_id, now)
            self._emit(case, "fee_refunded", {"reporter": case.reporter}, now)
            amount = self.ledger.charge_penalty(case.accused, case.case_id, now)
            self.guard.freeze_until_paid(case.accused, now)
            self._emit(
                case,
                "penalty_charged",
                {"abuser": case.accused, "amount": amount,
                 "frozen": self.guard.is_frozen(case.accused)},
                now,
            )
            certificate = self._issue_certificate(case, now)
            self._emit(
                case, "certificate_issued", {"certificate_id": certificate.certificate_id}, now
            )
        elif decision_state is CaseState.REJECTED_BAD_FAITH:
            self.ledger.forfeit(case.case_id, now)
            self.guard.record_forfeit(case.reporter)
            self._emit(case, "fee_forfeited", {"reporter": case.reporter}, now)
        else:  # good-faith rejection or inconclusive: honest-but-wrong pays nothing
            self.ledger.release_refund(case.case_id, now)
            self._emit(case, "fee_refunded", {"reporter": case.reporter}, now)

        participants = [b.verifier for b in case.ballots]
        if participants:
            share = self.ledger.payout_verifiers(case.case_id, participants, now)
            self._emit(case, "verifiers_paid", {"count": len(participants), "share": share}, now)
        self._update_reliabilities(case)
        self._emit(case, "accused_notified", {"accused": case.accused}, now)
        self._transition(case, CaseState.SETTLED, now)

    def _update_reliabilities(self, case: ReportCase) -> None:
        if case.state is CaseState.INCONCLUSIVE or case.outcome is None:
            return  # no ground truth to agree with
        final_verdict = case.outcome.decision is Decision.VALIDATED
        for ballot in case.ballots:
            profile = self.profiles.get(ballot.verifier)
            if profile is not None:
                self.profiles[ballot.verifier] = update_reliability(
                    profile, ballot.verdict == final_verdict
                )

    def _issue_certificate(self, case: ReportCase, now: datetime) -> AbuseCertificate:
        self._cert_seq += 1
        occurred_at = min(
            (self.vault.get_snapshot(s).captured_at for s in case.evidence),
            default=case.filed_at,
        )
        impact = case.outcome.aggregate_impact if case.outcome else None
        certificate = attest.issue_certificate(
            certificate_id=f"cert-{self._cert_seq:06d}",
            case_id=case.case_id,
            abuse_type=case.category.value,
            description=case.narrative,
            occurred_at=occurred_at,
            outcome_decision=Decision.VALIDATED.value,
            aggregate_impact=impact if impact is not None else 0,
            now=now,
            signing_key=self.signing_key,
        )
        self.certificates[certificate.certificate_id] = certificate
        case.certificate_id = certificate.certificate_id
        return certificate

    # -- progress ---------------------------------------------------------------------

    def progress(self, case_id: str, requester: str) -> ProgressView:
        case = self._get(case_id)
        if requester != case.reporter and requester not in self.admins:
            raise Forbidden(f"{requester} is not a party to case {case_id}")
        assignment = case.assignment
        active = case.state in (CaseState.UNDER_VERIFICATION, CaseState.ESCALATED)
        return ProgressView(
            case_id=case.case_id,
            state=case.state,
            events=list(case.events),
            ballots_received=len(case.ballots),
            ballots_expected=len(case.assigned()) or self.policy.k,
            deadline=assignment.deadline if assignment and active else None,
        )

    def export_state(self) -> dict:
        return {
            "cases": {cid: case.export() for cid, case in sorted(self.cases.items())},
            "profiles": {
                v: {
                    "agreements": p.agreements,
                    "participations": p.participations,
                    "qualified_since": ts_to_str(p.qualified_since) if p.qualified_since else None,
                }
                for v, p in sorted(self.profiles.items())
            },
            "acks": {cid: ack.envelope() for cid, ack in sorted(self.acks.items())},
            "certificates": {
                cert_id: cert.envelope() for cert_id, cert in sorted(self.certificates.items())
            },
        }
