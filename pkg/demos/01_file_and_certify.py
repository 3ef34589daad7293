"""Walkthrough: filing an abuse report and ending with a signed certificate.

A victim cites an abusive post, the platform escrows the filing fee and hands
back a signed receipt, a crowd of verifiers votes, and settlement refunds the
victim, fines the abuser, and issues a verifiable abuse certificate.
"""

import json
from datetime import datetime, timedelta, timezone

from redress import AbuseCategory, Platform, PlatformConfig, attest

now = datetime(2025, 1, 1, tzinfo=timezone.utc)
platform = Platform(PlatformConfig(signing_seed=1, dispatch_seed=1))

# -- set the stage: accounts, wallets, a verifier pool ------------------------
platform.register_account("alice", "alice", "Alice Adams", now)
platform.register_account("mallory", "mallory", "Mal Lory", now)
platform.fund_wallet("alice", 50_000, now)
platform.fund_wallet("mallory", 5_000, now)
for i in range(8):
    platform.register_account(f"v{i}", f"v{i}", f"Verifier {i}", now)
    platform.register_verifier(f"v{i}", now, qualified_since=now - timedelta(days=60))

# -- the abuse happens ---------------------------------------------------------
platform.publish_post("post-1", "mallory", "@alice nobody wants you here", now)

# -- alice reports it ------------------------------------------------------------
case, ack = platform.file_report(
    "alice",
    "mallory",
    AbuseCategory.HARASSMENT,
    "@mallory keeps attacking me in public threads",
    ["post-1"],
    now,
)
print("case:", case.case_id, "state:", case.state.value)
print("fee held in escrow:", platform.ledger.hold_amount(case.case_id))
print("signed receipt digest:", ack.report_digest.hex()[:32], "...")
print("receipt verifies:", attest.verify(ack, platform.signing_key.public_bytes))

# -- the crowd votes (they see only the anonymized view) ---------------------------
view = platform.redacted_view(case.case_id, now)
print("\nwhat a verifier sees:", json.dumps(view.export(), indent=2))
for verifier in list(case.assignment.verifiers):
    platform.submit_ballot(case.case_id, verifier, verdict=True, impact=4, bad_faith=False,
                           now=now + timedelta(hours=2))

# -- settlement --------------------------------------------------------------------
print("\nfinal state:", case.state.value)
print("alice's wallet (fee refunded):", platform.ledger.wallet_balance("alice"))
print("alice's victim share:", platform.ledger.balance("victim_share:alice"))
print("mallory's wallet (penalty charged):", platform.ledger.wallet_balance("mallory"))

certificate = platform.engine.certificates[case.certificate_id]
print("\ncertificate:", certificate.certificate_id)
print("  abuse type:", certificate.abuse_type)
print("  impact:", certificate.aggregate_impact)
print("  verifies:", attest.verify(certificate, platform.signing_key.public_bytes))
print("ledger still conserves money:", platform.ledger.trial_balance() == 0)
