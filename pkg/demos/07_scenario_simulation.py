"""Walkthrough: the deterministic agent simulator and the audit log.

A seeded scenario of victims, erasure-happy sockpuppeting abusers, and an
imperfect verifier crowd. The same spec always produces the same metrics
digest, and replaying the event log rebuilds the exact final state.
"""

import json

from redress import AgentGroup, ScenarioSpec, Simulation, replay, run_scenario

spec = ScenarioSpec(
    seed=2025,
    duration_days=10,
    agents=(
        AgentGroup(
            "Victim",
            5,
            {
                "report_probability": 0.9,
                "block_after_report": True,
                "block_on_contact": False,
                "bad_faith_rate": 0.1,
                "wallet": 200_000,
            },
        ),
        AgentGroup(
            "Abuser",
            4,
            {
                "contacts_per_day": 1.5,
                "send_posts": True,
                "erase_after_send": True,
                "respawn_after_block": True,
                "max_accounts": 3,
                "repay_after_days": 1,
                "wallet": 3_000,
            },
        ),
        AgentGroup("Verifier", 10, {"accuracy": 0.9, "response_rate": 0.9}),
    ),
)

report = run_scenario(spec)
print("metrics report:")
print(json.dumps(report.export(), indent=2))

print("\nsame spec, second run, same digest:", run_scenario(spec).digest == report.digest)

# -- auditability: every command is in the log; replay rebuilds the state ------------
sim = Simulation(spec)
sim.run()
log = sim.platform.log
print(f"\nevent log holds {len(log)} records "
      f"({sum(1 for r in log.records if r.module == 'platform')} commands)")
rebuilt = replay(log.records, spec.platform_config())
print("replayed state deep-equals the live state:",
      rebuilt.export_state() == sim.platform.export_state())
print("replayed trial balance:", rebuilt.ledger.trial_balance())
