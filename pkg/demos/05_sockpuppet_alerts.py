"""Walkthrough: linking sockpuppet accounts and warning their past victims.

One person, seven accounts, one reused payment instrument. After the victim
blocks the first account, every fresh account that makes contact triggers an
alert naming the blocked original — six alerts for contacts two through seven.
"""

from datetime import datetime, timedelta, timezone

from redress import AttributeKind, Platform, PlatformConfig

now = datetime(2025, 1, 1, tzinfo=timezone.utc)
platform = Platform(PlatformConfig(signing_seed=5))
platform.register_account("victim", "victim", "The Victim", now)

payment = platform.attribute_from_raw(AttributeKind.PAYMENT_INSTRUMENT, "card-1111")

alerts = 0
for n in range(1, 8):
    account = f"sock-{n}"
    platform.register_account(account, account, f"Totally New User {n}", now)
    platform.record_attribute(account, AttributeKind.PAYMENT_INSTRUMENT, payment.value_digest, now)
    alert = platform.contact(account, "victim", now)
    if alert:
        alerts += 1
        print(f"contact {n} from {account}: ALERT — linked to blocked {alert.linked_account}")
    else:
        print(f"contact {n} from {account}: no alert (nothing blocked yet)")
    platform.block("victim", account, now)
    now += timedelta(days=1)

print("\ntotal alerts:", alerts)
print("cluster members:", sorted(platform.linkage.cluster_members("sock-1")))
print("victim's alert feed:", len(platform.alerts_for("victim")), "entries")
