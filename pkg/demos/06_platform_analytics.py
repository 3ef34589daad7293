"""Walkthrough: the trust-and-safety statistics toolbox.

Normalized abuse rates, chi-square association tests, rank-based group
comparisons with tie correction, Spearman correlation, and the Bonferroni
post-hoc pipeline over a CSV of observations.
"""

import csv
import json
import random
import tempfile

from redress import stats

# -- normalized abuse report rates ("% of users who reported abuse") ------------
platform_counts = {
    "Instagram": (158, 40),
    "WhatsApp": (122, 18),
    "Twitter": (72, 29),
    "Discord": (31, 22),
}
print("abuse report rates:")
for name, (users, reported) in platform_counts.items():
    print(f"  {name:10s} {stats.abuse_rate(reported, users):6.2f}%  ({reported}/{users})")

# -- association between two categorical variables ---------------------------------
table = [[40, 118], [22, 9]]  # reported vs not, on two platforms
result = stats.chi_square(table)
print(f"\nchi-square: statistic={result.statistic:.4f} df={result.degrees_of_freedom} "
      f"p={result.p_value:.2e}")

# -- ordinal impact scores across groups ---------------------------------------------
rng = random.Random(1)
low = [rng.randint(1, 3) for _ in range(40)]
high = [rng.randint(2, 5) for _ in range(40)]
u = stats.mann_whitney_u(low, high)
print(f"mann-whitney U={u.statistic:.1f} p={u.p_value:.2e}")

groups = [low, high, [rng.randint(1, 5) for _ in range(40)]]
kw = stats.kruskal_wallis(groups)
print(f"kruskal-wallis H={kw.statistic:.3f} df={kw.degrees_of_freedom} p={kw.p_value:.2e}")

# -- monotonic relationships ------------------------------------------------------------
popularity = [158, 122, 72, 61, 46, 43, 35, 31]
abuse_counts = [40, 18, 29, 18, 16, 9, 11, 22]
print(f"spearman rank correlation: {stats.spearman(popularity, abuse_counts):+.3f}")

# -- multiple comparisons -----------------------------------------------------------------
print("bonferroni-adjusted alpha for 5 tests at 0.05:", stats.bonferroni(0.05, 5))

# -- the full CSV pipeline: omnibus test, then corrected pairwise post-hocs -----------------
with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False, newline="") as handle:
    writer = csv.writer(handle)
    writer.writerow(["group", "label", "value"])
    for group, lo, hi in (("men", 1, 3), ("women", 2, 5), ("nonbinary", 3, 5)):
        for _ in range(30):
            writer.writerow([group, rng.choice(["instagram", "discord"]), rng.randint(lo, hi)])
    path = handle.name

report = stats.analyze_csv(path)
print("\nCSV pipeline report:")
print(json.dumps(report, indent=2)[:1200])
