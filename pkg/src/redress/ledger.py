"""Double-entry escrow ledger: fee holds, refunds, forfeits, escalating
penalties, verifier payouts, and the victim revenue share.

All amounts are integer minor units. Every posting is a transfer from one
account to another (debit = source, credit = destination), so the sum of all
balances — including the explicit ``external`` funding account — is an
invariant zero. There is no real payment rail; funding a wallet is a transfer
from ``external``.

Account ids: ``wallet:<user>``, ``victim_share:<user>``, and the singletons
``escrow``, ``platform_revenue``, ``verifier_pool``, ``external``.
"""

import threading
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from fractions import Fraction
from typing import Optional

from .errors import InsufficientFunds, NoActiveHold
from .timefmt import ts_to_str


class AccountKind(Enum):
    USER_WALLET = "UserWallet"
    ESCROW = "Escrow"
    PLATFORM_REVENUE = "PlatformRevenue"
    VERIFIER_POOL = "VerifierPool"
    VICTIM_SHARE = "VictimShare"
    EXTERNAL = "External"


ESCROW = "escrow"
PLATFORM_REVENUE = "platform_revenue"
VERIFIER_POOL = "verifier_pool"
EXTERNAL = "external"


def wallet(user: str) -> str:
    return f"wallet:{user}"


def victim_share(user: str) -> str:
    return f"victim_share:{user}"


def account_kind(account_id: str) -> AccountKind:
    if account_id.startswith("wallet:"):
        return AccountKind.USER_WALLET
    if account_id.startswith("victim_share:"):
        return AccountKind.VICTIM_SHARE
    return {
        ESCROW: AccountKind.ESCROW,
        PLATFORM_REVENUE: AccountKind.PLATFORM_REVENUE,
        VERIFIER_POOL: AccountKind.VERIFIER_POOL,
        EXTERNAL: AccountKind.EXTERNAL,
    }[account_id]


@dataclass(frozen=True)
class PenaltySchedule:
    base_fee: int = 1000
    multiplier: Fraction = Fraction(2)
    victim_share_fraction: Fraction = Fraction(1, 2)
    verifier_pool_per_case: int = 500
    # split of forfeits / penalty remainder between verifier pool and platform
    pool_fraction: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.base_fee <= 0:
            raise ValueError("base_fee must be positive")
        if self.multiplier < 1:
            raise ValueError("multiplier must be >= 1")
        if not 0 <= self.victim_share_fraction <= 1:
            raise ValueError("victim_share_fraction must be in [0, 1]")


def penalty_amount(schedule: PenaltySchedule, offense_count: int) -> int:
    """base_fee · multiplier^(offense_count − 1), floored to minor units."""
    if offense_count < 1:
        raise ValueError("offense_count must be >= 1")
    amount = Fraction(schedule.base_fee) * schedule.multiplier ** (offense_count - 1)
    return int(amount)  # Fraction.__int__ truncates toward zero; amounts are positive


@dataclass(frozen=True)
class LedgerEntry:
    entry_id: str
    case_id: str
    debit_account: str
    credit_account: str
    amount: int
    posted_at: datetime
    memo: str

    def export(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "case_id": self.case_id,
            "debit_account": self.debit_account,
            "credit_account": self.credit_account,
            "amount": self.amount,
            "posted_at": ts_to_str(self.posted_at),
            "memo": self.memo,
        }


@dataclass
class _Hold:
    hold_id: str
    case_id: str
    reporter: str
    amount: int
    active: bool = True


class EscrowLedger:
    """Linearizable ledger: callers use the compound operations only."""

    def __init__(self, schedule: PenaltySchedule | None = None):
        self.schedule = schedule or PenaltySchedule()
        self.balances: dict[str, int] = {
            ESCROW: 0,
            PLATFORM_REVENUE: 0,
            VERIFIER_POOL: 0,
            EXTERNAL: 0,
        }
        self.entries: list[LedgerEntry] = []
        self._holds: dict[str, _Hold] = {}  # case_id -> hold
        self._special_status: set[str] = set()
        self._forfeit_counts: dict[str, int] = {}
        self._offense_counts: dict[str, int] = {}
        self._entry_seq = 0
        self._hold_seq = 0
        self._lock = threading.RLock()
        self.entry_sink = None  # optional callable(LedgerEntry), set by platform

    # -- accounts ------------------------------------------------------------

    def balance(self, account_id: str) -> int:
        return self.balances.get(account_id, 0)

    def wallet_balance(self, user: str) -> int:
        return self.balance(wallet(user))

    def set_special_status(self, user: str, special: bool = True) -> None:
        with self._lock:
            if special:
                self._special_status.add(user)
            else:
                self._special_status.discard(user)

    def is_exempt(self, user: str) -> bool:
        """Special-status users with a clean record pay no filing fee."""
        return user in self._special_status and self._forfeit_counts.get(user, 0) == 0

    def forfeit_count(self, user: str) -> int:
        return self._forfeit_counts.get(user, 0)

    def offense_count(self, user: str) -> int:
        return self._offense_counts.get(user, 0)

    def is_frozen(self, user: str) -> bool:
        """Debtors stay frozen until their wallet is non-negative again."""
        return self.wallet_balance(user) < 0

    # -- postings ------------------------------------------------------------

    def _post(
        self, case_id: str, debit: str, credit: str, amount: int, now: datetime, memo: str
    ) -> Optional[LedgerEntry]:
        if amount == 0:
            return None
        if amount < 0:
            raise ValueError("entry amount must be positive")
        if debit == credit:
            raise ValueError("debit and credit accounts must differ")
        self._entry_seq += 1
        entry = LedgerEntry(
            entry_id=f"entry-{self._entry_seq:08d}",
            case_id=case_id,
            debit_account=debit,
            credit_account=credit,
            amount=amount,
            posted_at=now,
            memo=memo,
        )
        self.balances[debit] = self.balances.get(debit, 0) - amount
        self.balances[credit] = self.balances.get(credit, 0) + amount
        if self.balances[ESCROW] < 0:
            raise AssertionError("escrow balance went negative")
        self.entries.append(entry)
        if self.entry_sink is not None:
            self.entry_sink(entry)
        return entry

    def fund_wallet(self, user: str, amount: int, now: datetime, memo: str = "funding") -> None:
        """Bring money onto the platform (mock payment rail)."""
        with self._lock:
            self._post("", EXTERNAL, wallet(user), amount, now, memo)

    # -- fee lifecycle ---------------------------------------------------------

    def hold_fee(self, reporter: str, case_id: str, amount: int, now: datetime) -> str:
        with self._lock:
            if amount < 0:
                raise ValueError("fee cannot be negative")
            if case_id in self._holds:
                raise ValueError(f"case {case_id} already has a hold")
            if self.wallet_balance(reporter) < amount:
                raise InsufficientFunds(
                    f"wallet {reporter} holds {self.wallet_balance(reporter)}, fee is {amount}"
                )
            self._hold_seq += 1
            hold = _Hold(f"hold-{self._hold_seq:06d}", case_id, reporter, amount)
            self._holds[case_id] = hold
            self._post(case_id, wallet(reporter), ESCROW, amount, now, "fee held in escrow")
            return hold.hold_id

    def _take_hold(self, case_id: str) -> _Hold:
        hold = self._holds.get(case_id)
        if hold is None or not hold.active:
            raise NoActiveHold(f"no active hold for case {case_id}")
        hold.active = False
        return hold

    def release_refund(self, case_id: str, now: datetime) -> None:
        with self._lock:
            hold = self._take_hold(case_id)
            self._post(case_id, ESCROW, wallet(hold.reporter), hold.amount, now, "fee refunded")

    def forfeit(self, case_id: str, now: datetime) -> None:
        """Bad-faith reporter loses the escrowed fee to pool + platform."""
        with self._lock:
            hold = self._take_hold(case_id)
            self._forfeit_counts[hold.reporter] = self._forfeit_counts.get(hold.reporter, 0) + 1
            pool_cut = int(Fraction(hold.amount) * self.schedule.pool_fraction)
            self._post(case_id, ESCROW, VERIFIER_POOL, pool_cut, now, "forfeit: verifier pool share")
            self._post(
                case_id, ESCROW, PLATFORM_REVENUE, hold.amount - pool_cut, now,
                "forfeit: platform share",
            )

    def hold_amount(self, case_id: str) -> Optional[int]:
        hold = self._holds.get(case_id)
        return hold.amount if hold else None

    # -- penalties and payouts -------------------------------------------------

    def charge_penalty(self, abuser: str, case_id: str, now: datetime) -> int:
        """Charge the escalating penalty; the wallet may go into debt.

        Split: victim_share_fraction to the reporter's victim-share account,
        pool_fraction of the remainder to the verifier pool, rest to platform.
        """
        with self._lock:
            hold = self._holds.get(case_id)
            reporter = hold.reporter if hold else None
            self._offense_counts[abuser] = self._offense_counts.get(abuser, 0) + 1
            amount = penalty_amount(self.schedule, self._offense_counts[abuser])
            victim_cut = 0
            if reporter is not None:
                victim_cut = int(Fraction(amount) * self.schedule.victim_share_fraction)
                self._post(
                    case_id, wallet(abuser), victim_share(reporter), victim_cut, now,
                    "penalty: victim share",
                )
            remainder = amount - victim_cut
            pool_cut = int(Fraction(remainder) * self.schedule.pool_fraction)
            self._post(case_id, wallet(abuser), VERIFIER_POOL, pool_cut, now, "penalty: verifier pool")
            self._post(
                case_id, wallet(abuser), PLATFORM_REVENUE, remainder - pool_cut, now,
                "penalty: platform share",
            )
            return amount

    def payout_verifiers(self, case_id: str, verifiers: list[str], now: datetime) -> int:
        """Equal shares of the per-case pot; integer remainder stays pooled."""
        with self._lock:
            if not verifiers:
                return 0
            pot = min(self.schedule.verifier_pool_per_case, self.balance(VERIFIER_POOL))
            share = pot // len(verifiers)
            for verifier in verifiers:
                self._post(case_id, VERIFIER_POOL, wallet(verifier), share, now, "verifier payout")
            return share

    # -- audit -----------------------------------------------------------------

    def trial_balance(self) -> int:
        """Conservation audit: sums every balance; zero unless corrupted."""
        return sum(self.balances.values())

    def export_entries(self) -> list[dict]:
        return [entry.export() for entry in self.entries]

    def export_state(self) -> dict:
        with self._lock:
            return {
                "balances": dict(sorted(self.balances.items())),
                "entries": self.export_entries(),
                "holds": {
                    case_id: {
                        "hold_id": hold.hold_id,
                        "reporter": hold.reporter,
                        "amount": hold.amount,
                        "active": hold.active,
                    }
                    for case_id, hold in sorted(self._holds.items())
                },
                "special_status": sorted(self._special_status),
                "forfeit_counts": dict(sorted(self._forfeit_counts.items())),
                "offense_counts": dict(sorted(self._offense_counts.items())),
            }


def replay_entries(entries: list[dict]) -> dict[str, int]:
    """Rebuild balances from an exported entry stream (JSONL checker)."""
    balances: dict[str, int] = {}
    for entry in entries:
        amount = entry["amount"]
        balances[entry["debit_account"]] = balances.get(entry["debit_account"], 0) - amount
        balances[entry["credit_account"]] = balances.get(entry["credit_account"], 0) + amount
    return balances


def write_jsonl(ledger: EscrowLedger, path) -> int:
    """Export the entry stream as one JSON object per line; returns the count."""
    import json

    with open(path, "w", encoding="utf-8") as handle:
        for entry in ledger.entries:
            handle.write(json.dumps(entry.export(), sort_keys=True) + "\n")
    return len(ledger.entries)


def read_jsonl(path) -> dict[str, int]:
    """Replay an exported JSONL file back into balances."""
    import json

    with open(path, encoding="utf-8") as handle:
        return replay_entries([json.loads(line) for line in handle if line.strip()])
