"""Deterministic agent simulator: victims who report and block, abusers who
erase evidence, respawn sockpuppets and rack up repeat offenses, and verifier
crowds with configurable accuracy and response rates.

A scenario's seed fully determines the run: virtual clock, one seeded RNG,
single-threaded stepping. The emitted metrics report hashes to the same digest
on every run of the same spec.
"""

import math
import random
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .attest import digest
from .cases import AbuseCategory, CaseState
from .crowd import AggregationPolicy
from .errors import (
    AccountFrozen,
    InsufficientFunds,
    RateLimited,
    RedressError,
    SpecInvalid,
)
from .eventlog import EventLog
from .guard import RateLimitPolicy
from .ledger import PenaltySchedule
from .linkage import AttributeKind
from .platform import Platform, PlatformConfig
from .timefmt import UTC
from .vault import RetentionPolicy

EPOCH = datetime(2025, 1, 1, tzinfo=UTC)

_CATEGORIES = list(AbuseCategory)

_VICTIM_DEFAULTS = {
    "report_probability": 0.9,
    "block_after_report": True,
    "block_on_contact": False,
    "bad_faith_rate": 0.0,
    "wallet": 100_000,
}
_ABUSER_DEFAULTS = {
    "contacts_per_day": 1.0,
    "send_posts": True,
    "erase_after_send": False,
    "respawn_after_block": False,
    "max_accounts": 1,
    "repay_after_days": None,
    "wallet": 2_000,
}
_VERIFIER_DEFAULTS = {
    "accuracy": 0.9,
    "response_rate": 1.0,
}

_ROLES = {"Victim": _VICTIM_DEFAULTS, "Abuser": _ABUSER_DEFAULTS, "Verifier": _VERIFIER_DEFAULTS}


@dataclass(frozen=True)
class AgentGroup:
    role: str
    count: int
    behavior: dict

    def param(self, name: str):
        return self.behavior[name]


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    duration_days: int
    agents: tuple[AgentGroup, ...]
    aggregation: AggregationPolicy = field(default_factory=AggregationPolicy)
    penalty: PenaltySchedule = field(default_factory=PenaltySchedule)
    rate_limit: RateLimitPolicy = field(default_factory=RateLimitPolicy)
    retention: RetentionPolicy = field(default_factory=RetentionPolicy)
    ticks_per_day: int = 4

    def platform_config(self) -> PlatformConfig:
        return PlatformConfig(
            aggregation=self.aggregation,
            penalty=self.penalty,
            rate_limit=self.rate_limit,
            retention=self.retention,
            signing_seed=self.seed,
            dispatch_seed=self.seed,
        )


def scenario_from_dict(raw: dict) -> ScenarioSpec:
    """Parse and validate a scenario document; unknown keys are rejected."""
    try:
        seed = int(raw["seed"])
        duration_days = int(raw["duration_days"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecInvalid(f"scenario needs integer 'seed' and 'duration_days': {exc}") from exc
    if duration_days < 1:
        raise SpecInvalid("duration_days must be >= 1")
    groups = []
    for entry in raw.get("agents", []):
        role = entry.get("role")
        if role not in _ROLES:
            raise SpecInvalid(f"unknown agent role: {role!r}")
        count = entry.get("count", 0)
        if not isinstance(count, int) or count < 0:
            raise SpecInvalid(f"agent count must be a non-negative integer, got {count!r}")
        defaults = dict(_ROLES[role])
        behavior = entry.get("behavior", {})
        unknown = set(behavior) - set(defaults)
        if unknown:
            raise SpecInvalid(f"unknown behavior keys for {role}: {sorted(unknown)}")
        defaults.update(behavior)
        groups.append(AgentGroup(role, count, defaults))

    from .config import policies_from_dict

    aggregation, penalty, rate_limit, retention = policies_from_dict(
        raw.get("policies", {}), error_cls=SpecInvalid
    )
    return ScenarioSpec(
        seed=seed,
        duration_days=duration_days,
        agents=tuple(groups),
        aggregation=aggregation,
        penalty=penalty,
        rate_limit=rate_limit,
        retention=retention,
        ticks_per_day=int(raw.get("ticks_per_day", 4)),
    )


@dataclass(frozen=True)
class MetricsReport:
    certificates_issued: int
    reports_filed: int
    bad_faith_forfeits: int
    alerts_emitted: int
    evidence_recoveries: int
    ledger_trial_balance: int
    digest: str

    def export(self) -> dict:
        return {
            "certificates_issued": self.certificates_issued,
            "reports_filed": self.reports_filed,
            "bad_faith_forfeits": self.bad_faith_forfeits,
            "alerts_emitted": self.alerts_emitted,
            "evidence_recoveries": self.evidence_recoveries,
            "ledger_trial_balance": self.ledger_trial_balance,
            "digest": self.digest,
        }


def _report_digest(counters: dict) -> str:
    return digest(counters).hex()


@dataclass
class _Abuser:
    persona: str
    behavior: dict
    accounts: list[str]
    payment_value: str
    frozen_since: datetime | None = None

    @property
    def current(self) -> str:
        return self.accounts[-1]


@dataclass
class _Victim:
    account: str
    behavior: dict
    inbox: list[tuple[str, str]] = field(default_factory=list)  # (post_id, sender)
    benign_post: str = ""


class Simulation:
    """Single-threaded scenario driver over a virtual clock."""

    def __init__(self, spec: ScenarioSpec, log: EventLog | None = None):
        self.spec = spec
        self.platform = Platform(spec.platform_config(), log=log)
        self.rng = random.Random(spec.seed)
        self.now = EPOCH
        self.tick_delta = timedelta(days=1) / spec.ticks_per_day
        self.victims: list[_Victim] = []
        self.abusers: list[_Abuser] = []
        self.verifiers: list[str] = []
        self.verifier_behavior: dict[str, dict] = {}
        self._post_truth: dict[str, bool] = {}  # post_id -> abusive
        self._post_impact: dict[str, int] = {}
        self._case_truth: dict[str, tuple[bool, int]] = {}  # case_id -> (abusive, impact)
        self._respond_choice: dict[tuple[str, str], bool] = {}
        self._post_seq = 0
        self._setup()

    # -- setup ---------------------------------------------------------------------

    def _setup(self) -> None:
        platform, now = self.platform, self.now
        verifier_birth = EPOCH - timedelta(days=40)  # old enough to pass the age gate
        for group in self.spec.agents:
            for index in range(group.count):
                if group.role == "Victim":
                    account = f"victim-{len(self.victims) + 1:03d}"
                    platform.register_account(account, account, f"Victim {index + 1}", now)
                    platform.fund_wallet(account, group.param("wallet"), now)
                    victim = _Victim(account, group.behavior)
                    self.victims.append(victim)
                elif group.role == "Abuser":
                    persona = f"abuser-{len(self.abusers) + 1:03d}"
                    account = f"{persona}-a1"
                    platform.register_account(account, account, f"User {account}", now)
                    platform.fund_wallet(account, group.param("wallet"), now)
                    abuser = _Abuser(persona, group.behavior, [account], f"pay-{persona}")
                    platform.record_attribute(
                        account,
                        AttributeKind.PAYMENT_INSTRUMENT,
                        platform.attribute_from_raw(
                            AttributeKind.PAYMENT_INSTRUMENT, abuser.payment_value
                        ).value_digest,
                        now,
                    )
                    self.abusers.append(abuser)
                else:
                    account = f"verifier-{len(self.verifiers) + 1:03d}"
                    platform.register_account(account, account, f"Verifier {index + 1}", now)
                    platform.register_verifier(account, now, qualified_since=verifier_birth)
                    self.verifiers.append(account)
                    self.verifier_behavior[account] = group.behavior
        # benign posts give framers something to cite
        for victim in self.victims:
            self._post_seq += 1
            post_id = f"post-{self._post_seq:06d}"
            platform.publish_post(post_id, victim.account, f"sharing my day, post {post_id}", now)
            self._post_truth[post_id] = False
            self._post_impact[post_id] = 1
            victim.benign_post = post_id

    # -- per-tick behavior -------------------------------------------------------------

    def _abuser_step(self, abuser: _Abuser) -> None:
        platform, rng = self.platform, self.rng
        behavior = abuser.behavior
        if platform.guard.is_frozen(abuser.current):
            self._maybe_repay(abuser)
            if platform.guard.is_frozen(abuser.current):
                return
        if rng.random() >= behavior["contacts_per_day"] / self.spec.ticks_per_day:
            return
        if not self.victims:
            return
        victim = rng.choice(self.victims)
        blocked = abuser.current in platform.linkage.flagged_by(victim.account)
        if blocked:
            if not behavior["respawn_after_block"] or len(abuser.accounts) >= behavior["max_accounts"]:
                return
            account = f"{abuser.persona}-a{len(abuser.accounts) + 1}"
            platform.register_account(account, account, f"User {account}", self.now)
            platform.fund_wallet(account, behavior["wallet"], self.now)
            platform.record_attribute(
                account,
                AttributeKind.PAYMENT_INSTRUMENT,
                platform.attribute_from_raw(
                    AttributeKind.PAYMENT_INSTRUMENT, abuser.payment_value
                ).value_digest,
                self.now,
            )
            abuser.accounts.append(account)
        sender = abuser.current
        post_id = None
        if behavior["send_posts"]:
            self._post_seq += 1
            post_id = f"post-{self._post_seq:06d}"
            text = f"@{victim.account} you will regret this, everyone look at @{victim.account}"
            platform.publish_post(post_id, sender, text, self.now)
            self._post_truth[post_id] = True
            self._post_impact[post_id] = self.rng.randint(2, 5)
        platform.contact(sender, victim.account, self.now)
        if post_id is not None:
            victim.inbox.append((post_id, sender))
            if behavior["erase_after_send"]:
                platform.erase_post(post_id, sender, self.now)
        if victim.behavior["block_on_contact"]:
            platform.block(victim.account, sender, self.now)

    def _maybe_repay(self, abuser: _Abuser) -> None:
        days = abuser.behavior["repay_after_days"]
        if days is None:
            return
        if abuser.frozen_since is None:
            abuser.frozen_since = self.now
            return
        if self.now - abuser.frozen_since >= timedelta(days=days):
            debt = -self.platform.ledger.wallet_balance(abuser.current)
            self.platform.fund_wallet(abuser.current, debt + abuser.behavior["wallet"], self.now)
            abuser.frozen_since = None

    def _victim_step(self, victim: _Victim) -> None:
        platform, rng = self.platform, self.rng
        if victim.inbox:
            post_id, sender = victim.inbox[0]
            if rng.random() < victim.behavior["report_probability"]:
                narrative = f"@{sender} attacked me in {post_id}"
                try:
                    case, _ack = platform.file_report(
                        victim.account,
                        sender,
                        rng.choice(_CATEGORIES),
                        narrative,
                        [post_id],
                        self.now,
                        rng_seed=rng.getrandbits(32),
                    )
                except RateLimited:
                    return  # keep it in the inbox; retry next tick
                except (InsufficientFunds, AccountFrozen, RedressError):
                    victim.inbox.pop(0)
                    return
                victim.inbox.pop(0)
                self._case_truth[case.case_id] = (True, self._post_impact[post_id])
                if victim.behavior["block_after_report"]:
                    platform.block(victim.account, sender, self.now)
            else:
                victim.inbox.pop(0)
        elif victim.behavior["bad_faith_rate"] > 0 and len(self.victims) > 1:
            if rng.random() < victim.behavior["bad_faith_rate"] / self.spec.ticks_per_day:
                target = rng.choice([v for v in self.victims if v is not victim])
                narrative = f"@{target.account} is harassing me, see {target.benign_post}"
                try:
                    case, _ack = platform.file_report(
                        victim.account,
                        target.account,
                        rng.choice(_CATEGORIES),
                        narrative,
                        [target.benign_post],
                        self.now,
                        rng_seed=rng.getrandbits(32),
                    )
                except (RateLimited, InsufficientFunds, AccountFrozen, RedressError):
                    return
                self._case_truth[case.case_id] = (False, 1)

    def _verifier_step(self, verifier: str) -> None:
        platform, rng = self.platform, self.rng
        behavior = self.verifier_behavior[verifier]
        for case_id in platform.assignments_for(verifier, self.now):
            key = (verifier, case_id)
            if key not in self._respond_choice:
                self._respond_choice[key] = rng.random() < behavior["response_rate"]
            if not self._respond_choice[key]:
                continue
            abusive, impact = self._case_truth.get(case_id, (False, 1))
            verdict = abusive if rng.random() < behavior["accuracy"] else not abusive
            frame = not abusive
            bad_faith = frame if rng.random() < behavior["accuracy"] else not frame
            vote_impact = min(5, max(1, impact + rng.choice((-1, 0, 1))))
            try:
                platform.submit_ballot(case_id, verifier, verdict, vote_impact, bad_faith, self.now)
            except RedressError:
                continue

    # -- driving -------------------------------------------------------------------------

    def step(self) -> None:
        self.platform.tick(self.now)
        for abuser in self.abusers:
            self._abuser_step(abuser)
        for victim in self.victims:
            self._victim_step(victim)
        for verifier in self.verifiers:
            self._verifier_step(verifier)
        self.now += self.tick_delta

    def run(self) -> MetricsReport:
        for _ in range(self.spec.duration_days * self.spec.ticks_per_day):
            self.step()
        self._drain()
        return self.report()

    def _drain(self) -> None:
        """Let in-flight cases settle: deadline passage bounds the wait."""
        deadline_ticks = math.ceil(self.spec.aggregation.deadline / self.tick_delta)
        for _ in range(2 * deadline_ticks + 2):
            if all(
                case.state is CaseState.SETTLED for case in self.platform.engine.cases.values()
            ):
                break
            self.platform.tick(self.now)
            for verifier in self.verifiers:
                self._verifier_step(verifier)
            self.now += self.tick_delta
        self.platform.tick(self.now)

    def report(self) -> MetricsReport:
        counters = self.platform.metrics(self.now)
        return MetricsReport(digest=_report_digest(counters), **counters)


def run_scenario(spec: ScenarioSpec, log: EventLog | None = None) -> MetricsReport:
    """Run a scenario start to finish; identical specs give identical digests."""
    return Simulation(spec, log=log).run()
