"""Verifier selection, evidence anonymization, and ballot aggregation.

Verdicts aggregate by strict majority or by reliability-weighted score with an
exact rational threshold; impact scores aggregate by median. Verifier weights
are Laplace-smoothed agreement rates, so a fresh verifier starts at 1/2 and
reliability can never reach 0 or 1.
"""

import random
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timedelta
from enum import Enum
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .errors import BelowQuorum, NoBallots, PoolTooSmall

IMPACT_MIN, IMPACT_MAX = 1, 5


def check_impact(value: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not IMPACT_MIN <= value <= IMPACT_MAX:
        raise ValueError(f"impact score must be an integer in [1, 5], got {value!r}")
    return value


class Decision(Enum):
    VALIDATED = "Validated"
    REJECTED_GOOD_FAITH = "RejectedGoodFaith"
    REJECTED_BAD_FAITH = "RejectedBadFaith"
    TIE = "Tie"


class AggregationMode(Enum):
    MAJORITY = "Majority"
    WEIGHTED = "Weighted"


@dataclass(frozen=True)
class VerifierProfile:
    verifier: str
    agreements: int = 0
    participations: int = 0
    qualified_since: Optional[datetime] = None

    @property
    def reliability(self) -> Fraction:
        # Laplace prior keeps reliability strictly inside (0, 1)
        return Fraction(self.agreements + 1, self.participations + 2)


def update_reliability(profile: VerifierProfile, agreed_with_outcome: bool) -> VerifierProfile:
    return replace(
        profile,
        participations=profile.participations + 1,
        agreements=profile.agreements + (1 if agreed_with_outcome else 0),
    )


@dataclass(frozen=True)
class Ballot:
    verifier: str
    verdict: bool  # abuse / not abuse
    impact: int
    bad_faith: bool  # reporter acting maliciously
    submitted_at: datetime

    def __post_init__(self):
        check_impact(self.impact)


@dataclass(frozen=True)
class AggregationPolicy:
    k: int = 5
    mode: AggregationMode = AggregationMode.MAJORITY
    theta: Fraction = Fraction(1, 2)
    quorum: int = 3
    deadline: timedelta = timedelta(hours=72)

    def __post_init__(self):
        if self.k < 3:
            raise ValueError("k must be >= 3")
        if self.mode is AggregationMode.MAJORITY and self.k % 2 == 0:
            raise ValueError("k must be odd for majority aggregation")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie strictly between 0 and 1")
        if not 1 <= self.quorum <= self.k:
            raise ValueError("quorum must lie in [1, k]")


@dataclass(frozen=True)
class AggregateOutcome:
    decision: Decision
    aggregate_impact: Optional[int]  # defined only when decision is Validated
    ballots_used: int

    def export(self) -> dict:
        return {
            "decision": self.decision.value,
            "aggregate_impact": self.aggregate_impact,
            "ballots_used": self.ballots_used,
        }


MIN_ACCOUNT_AGE = timedelta(days=30)
MIN_RELIABILITY = Fraction(1, 2)


def select_verifiers(
    pool: Sequence[VerifierProfile],
    reporter: str,
    accused: str,
    k: int,
    rng_seed: int,
    now: datetime,
    cluster_of: Callable[[str], str] | None = None,
    exclude: set[str] | None = None,
) -> list[str]:
    """Seeded uniform sample of k eligible verifiers.

    Eligible: reliability >= 1/2, account age >= 30 days, not a party to the
    case, not in either party's linkage cluster, not explicitly excluded
    (prior-round assignees at escalation). The pool is canonically sorted by
    account id first, so the draw is invariant under pool permutation.
    """
    conflicted = {reporter, accused}
    if cluster_of is not None:
        conflicted_clusters = {cluster_of(reporter), cluster_of(accused)}
    else:
        conflicted_clusters = set()
    eligible = []
    for profile in sorted(pool, key=lambda p: p.verifier):
        if profile.verifier in conflicted:
            continue
        if exclude and profile.verifier in exclude:
            continue
        if profile.reliability < MIN_RELIABILITY:
            continue
        if profile.qualified_since is not None and now - profile.qualified_since < MIN_ACCOUNT_AGE:
            continue
        if cluster_of is not None and cluster_of(profile.verifier) in conflicted_clusters:
            continue
        eligible.append(profile.verifier)
    if len(eligible) < k:
        raise PoolTooSmall(f"need {k} eligible verifiers, found {len(eligible)}")
    return random.Random(rng_seed).sample(eligible, k)


# -- anonymization ------------------------------------------------------------


@dataclass
class RedactedView:
    case_id: str
    category: str
    redacted_narrative: str
    redacted_evidence: list[str] = field(default_factory=list)

    def export(self) -> dict:
        return {
            "case_id": self.case_id,
            "category": self.category,
            "redacted_narrative": self.redacted_narrative,
            "redacted_evidence": list(self.redacted_evidence),
        }


def _build_pattern(handles: dict[str, str], names: dict[str, str]) -> re.Pattern | None:
    # longest-first so "@alicia" wins over "@ali"
    alternatives = []
    for handle in sorted(handles, key=len, reverse=True):
        alternatives.append(r"@" + re.escape(handle) + r"\b")
    for name in sorted(names, key=len, reverse=True):
        alternatives.append(r"\b" + re.escape(name) + r"\b")
    if not alternatives:
        return None
    return re.compile("|".join(alternatives))


def anonymize_texts(
    texts: Sequence[str],
    reporter: str,
    accused: str,
    directory: dict[str, tuple[str, str]],
) -> list[str]:
    """Replace known handles/display names with role tokens.

    ``directory`` maps account id -> (handle, display name). Party mentions
    become [REPORTER]/[ACCUSED]; any other known account becomes [USER-n] with
    n assigned in order of first appearance across all texts, stable given the
    same inputs. Unknown names pass through: substitution covers registered
    identities only.
    """
    handles = {handle: acct for acct, (handle, _name) in directory.items() if handle}
    names = {name: acct for acct, (_handle, name) in directory.items() if name}
    pattern = _build_pattern(handles, names)
    if pattern is None:
        return list(texts)

    user_tokens: dict[str, str] = {}

    def token_for(account: str) -> str:
        if account == reporter:
            return "[REPORTER]"
        if account == accused:
            return "[ACCUSED]"
        if account not in user_tokens:
            user_tokens[account] = f"[USER-{len(user_tokens) + 1}]"
        return user_tokens[account]

    def substitute(match: re.Match) -> str:
        mention = match.group(0)
        account = handles.get(mention[1:]) if mention.startswith("@") else names.get(mention)
        if account is None:  # display name that collides with a handle pattern
            account = names.get(mention) or handles.get(mention.lstrip("@"))
        return token_for(account) if account else mention

    return [pattern.sub(substitute, text) for text in texts]


# -- aggregation ----------------------------------------------------------------


def _rejection_flavor(bad_faith_weight: Fraction, total_weight: Fraction) -> Decision:
    # strict majority (weighted or counted) of ALL ballots must flag bad faith
    if bad_faith_weight * 2 > total_weight:
        return Decision.REJECTED_BAD_FAITH
    return Decision.REJECTED_GOOD_FAITH


def aggregate_majority(ballots: Sequence[Ballot], quorum: int = 1) -> AggregateOutcome:
    """Strict-majority verdict; exact verdict tie -> Tie."""
    if len(ballots) < quorum:
        raise BelowQuorum(f"{len(ballots)} ballots, quorum is {quorum}")
    n = len(ballots)
    yes = sum(1 for b in ballots if b.verdict)
    no = n - yes
    if yes > no:
        return AggregateOutcome(Decision.VALIDATED, aggregate_impact(ballots), n)
    if yes == no:
        return AggregateOutcome(Decision.TIE, None, n)
    bad_faith = sum(1 for b in ballots if b.bad_faith)
    return AggregateOutcome(_rejection_flavor(Fraction(bad_faith), Fraction(n)), None, n)


def aggregate_weighted(
    ballots: Sequence[Ballot],
    profiles: dict[str, VerifierProfile],
    theta: Fraction = Fraction(1, 2),
    quorum: int = 1,
) -> AggregateOutcome:
    """Reliability-weighted verdict score against threshold theta.

    score = sum(reliability_i * verdict_i) / sum(reliability_i); score above
    theta validates, exactly theta is a tie. Bad-faith flavor uses the same
    weighting against a strict-majority (1/2) cut.
    """
    if len(ballots) < quorum:
        raise BelowQuorum(f"{len(ballots)} ballots, quorum is {quorum}")
    theta = Fraction(theta)
    total = Fraction(0)
    yes_weight = Fraction(0)
    bad_faith_weight = Fraction(0)
    for ballot in ballots:
        weight = profiles[ballot.verifier].reliability
        total += weight
        if ballot.verdict:
            yes_weight += weight
        if ballot.bad_faith:
            bad_faith_weight += weight
    score = yes_weight / total
    if score > theta:
        return AggregateOutcome(Decision.VALIDATED, aggregate_impact(ballots), len(ballots))
    if score == theta:
        return AggregateOutcome(Decision.TIE, None, len(ballots))
    return AggregateOutcome(_rejection_flavor(bad_faith_weight, total), None, len(ballots))


def aggregate_impact(ballots: Sequence[Ballot]) -> int:
    """Median impact; even counts take the midpoint rounded half away from zero."""
    if not ballots:
        raise NoBallots("no ballots to aggregate")
    impacts = sorted(b.impact for b in ballots)
    n = len(impacts)
    if n % 2 == 1:
        return impacts[n // 2]
    midpoint = Fraction(impacts[n // 2 - 1] + impacts[n // 2], 2)
    return int(midpoint + Fraction(1, 2))  # positive scores: half away from zero == half up


def aggregate(
    ballots: Sequence[Ballot],
    policy: AggregationPolicy,
    profiles: dict[str, VerifierProfile] | None = None,
) -> AggregateOutcome:
    if policy.mode is AggregationMode.MAJORITY:
        return aggregate_majority(ballots, policy.quorum)
    return aggregate_weighted(ballots, profiles or {}, policy.theta, policy.quorum)
