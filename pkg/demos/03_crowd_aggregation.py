"""Walkthrough: how verifier ballots become decisions.

Majority voting, reliability-weighted voting with an exact rational threshold,
median impact scoring, and the Laplace-smoothed reliability updates that feed
the weights.
"""

from datetime import datetime, timezone
from fractions import Fraction

from redress import (
    Ballot,
    VerifierProfile,
    aggregate_impact,
    aggregate_majority,
    aggregate_weighted,
    update_reliability,
)

now = datetime(2025, 1, 1, tzinfo=timezone.utc)


def ballots(verdicts, bad_faiths=None, impacts=None):
    bad_faiths = bad_faiths or [False] * len(verdicts)
    impacts = impacts or [3] * len(verdicts)
    return [
        Ballot(f"v{i}", v, imp, bf, now)
        for i, (v, bf, imp) in enumerate(zip(verdicts, bad_faiths, impacts))
    ]


# -- majority voting ---------------------------------------------------------
print("2 of 3 say abuse:", aggregate_majority(ballots([True, True, False])).decision.value)
print(
    "all reject, 2 of 3 flag the reporter:",
    aggregate_majority(ballots([False] * 3, bad_faiths=[True, True, False])).decision.value,
)
print("2-2 split:", aggregate_majority(ballots([True, True, False, False])).decision.value)

# -- weighted voting ------------------------------------------------------------
# weights are smoothed agreement rates: a veteran at 9/10, two rookies at 1/2
profiles = {
    "v0": VerifierProfile("v0", agreements=8, participations=8),   # 9/10
    "v1": VerifierProfile("v1"),                                   # 1/2
    "v2": VerifierProfile("v2"),                                   # 1/2
}
outcome = aggregate_weighted(ballots([True, False, False]), profiles, theta=Fraction(1, 2))
print("\nveteran says abuse, rookies disagree:")
print("  weighted score = (9/10) / (9/10 + 1/2 + 1/2) =", Fraction(9, 19), "->", outcome.decision.value)

# -- impact scores -------------------------------------------------------------
print("\nmedian of [2, 4, 5]:", aggregate_impact(ballots([True] * 3, impacts=[2, 4, 5])))
print("even count [2, 3, 4, 5] rounds 3.5 up:", aggregate_impact(ballots([True] * 4, impacts=[2, 3, 4, 5])))

# -- reliability updates ----------------------------------------------------------
profile = VerifierProfile("rookie")
print("\nfresh reliability:", profile.reliability)
for agreed in (True, True, True):
    profile = update_reliability(profile, agreed)
print("after agreeing 3 of 3:", profile.reliability)
for agreed in (False, False):
    profile = update_reliability(profile, agreed)
print("after two misses:", profile.reliability)
