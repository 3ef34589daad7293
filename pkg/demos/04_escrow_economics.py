"""Walkthrough: who pays for abuse verification.

Honest reporters get their escrowed fee back. Bad-faith reporters forfeit it
to the platform and the verifier pool, and their next filing costs double.
Verified abusers pay escalating penalties, half of which flows to the victim,
and stay frozen while in debt. The books balance after every step.
"""

from datetime import datetime, timezone
from fractions import Fraction

from redress import EscrowLedger, Guard, PenaltySchedule, penalty_amount
from redress.ledger import PLATFORM_REVENUE, VERIFIER_POOL

now = datetime(2025, 1, 1, tzinfo=timezone.utc)
schedule = PenaltySchedule(
    base_fee=1000,
    multiplier=Fraction(2),
    victim_share_fraction=Fraction(1, 2),
    verifier_pool_per_case=500,
)
ledger = EscrowLedger(schedule)
guard = Guard(balance_of=ledger.wallet_balance)
ledger.fund_wallet("alice", 10_000, now)
ledger.fund_wallet("troll", 10_000, now)

# -- the honest path: hold then refund ------------------------------------------
ledger.hold_fee("alice", "case-1", 1000, now)
print("during verification, escrow holds:", ledger.balance("escrow"))
ledger.release_refund("case-1", now)
print("after a good-faith outcome, alice is whole:", ledger.wallet_balance("alice"))

# -- the bad-faith path: forfeit and doubled future fees ---------------------------
ledger.hold_fee("troll", "case-2", 1000, now)
ledger.forfeit("case-2", now)
guard.record_forfeit("troll")
print("\nforfeit split -> verifier pool:", ledger.balance(VERIFIER_POOL),
      "platform:", ledger.balance(PLATFORM_REVENUE))
print("troll's next filing fee:", guard.adjusted_fee("troll", schedule.base_fee))

# -- the abuser path: escalating penalties, victim share, freeze ----------------------
print("\npenalty schedule:", [penalty_amount(schedule, n) for n in (1, 2, 3, 4)])
ledger.hold_fee("alice", "case-3", 1000, now)
charged = ledger.charge_penalty("mallory", "case-3", now)
ledger.release_refund("case-3", now)
print("first offense charged:", charged)
print("victim share credited to alice:", ledger.balance("victim_share:alice"))
print("mallory's wallet (debt allowed):", ledger.wallet_balance("mallory"))
print("mallory frozen:", guard.is_frozen("mallory"))
ledger.fund_wallet("mallory", 1000, now)
print("after repayment, frozen:", guard.is_frozen("mallory"))

# -- verifiers get paid from the pool ----------------------------------------------
ledger.payout_verifiers("case-3", ["v1", "v2", "v3"], now)
print("\nverifier wallets:", [ledger.wallet_balance(v) for v in ("v1", "v2", "v3")])

# -- conservation audit --------------------------------------------------------------
print("trial balance (must be 0):", ledger.trial_balance())
