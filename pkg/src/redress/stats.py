"""Nonparametric statistics for platform trust-and-safety analytics.

Implements normalized abuse report rates, chi-square tests of independence,
Mann-Whitney U and Kruskal-Wallis tests with average ranks and tie correction,
Spearman rank correlation, and the Bonferroni correction. p-values use the
asymptotic approximations (chi-square upper tail; normal approximation with
tie correction for U); exact/permutation p-values are left to test oracles.

Also ships a small offline pipeline: read observations from CSV, run the
omnibus test, and follow significant outcomes with Bonferroni-corrected
pairwise comparisons.
"""

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaincc

from .errors import (
    DegenerateTable,
    EmptyGroup,
    InvalidArgs,
    InvalidCounts,
    LengthMismatch,
    TooFewGroups,
)


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    degrees_of_freedom: Optional[int]
    method: str

    def export(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "degrees_of_freedom": self.degrees_of_freedom,
            "method": self.method,
        }


@dataclass(frozen=True)
class SampleGroup:
    label: str
    observations: tuple[float, ...]

    def __post_init__(self):
        if not self.observations:
            raise EmptyGroup(f"group {self.label!r} has no observations")


def abuse_rate(reported: int, users: int) -> float:
    """Percentage of users who reported abuse: 100 * reported / users."""
    if users <= 0 or reported < 0 or reported > users:
        raise InvalidCounts(f"need 0 <= reported <= users, users > 0; got {reported}/{users}")
    return 100.0 * reported / users


def _norm_sf(z: float) -> float:
    """Standard normal upper tail."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _chi2_sf(x: float, df: int) -> float:
    """Chi-square upper tail via the regularized incomplete gamma function."""
    if x <= 0:
        return 1.0
    return float(gammaincc(df / 2.0, x / 2.0))


def rankdata(values: Sequence[float]) -> np.ndarray:
    """Fractional ranking: ties share the mean of the ranks they occupy."""
    a = np.asarray(values, dtype=float)
    order = np.argsort(a, kind="stable")
    ranks = np.empty(len(a), dtype=float)
    i = 0
    while i < len(a):
        j = i
        while j + 1 < len(a) and a[order[j + 1]] == a[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _tie_term(pooled: Sequence[float]) -> float:
    """Sum of t^3 - t over tie groups of the pooled sample."""
    _, counts = np.unique(np.asarray(pooled, dtype=float), return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def chi_square(table: Sequence[Sequence[float]], continuity: bool = False) -> TestResult:
    """Pearson chi-square test of independence on an r x c count table."""
    observed = np.asarray(table, dtype=float)
    if observed.ndim != 2 or observed.shape[0] < 2 or observed.shape[1] < 2:
        raise DegenerateTable("need at least a 2x2 table")
    if np.any(observed < 0):
        raise DegenerateTable("counts must be non-negative")
    row_totals = observed.sum(axis=1)
    col_totals = observed.sum(axis=0)
    total = observed.sum()
    if total == 0 or np.any(row_totals == 0) or np.any(col_totals == 0):
        raise DegenerateTable("a zero marginal makes expected counts undefined")
    expected = np.outer(row_totals, col_totals) / total
    deviations = np.abs(observed - expected)
    if continuity:
        deviations = np.maximum(deviations - 0.5, 0.0)
    statistic = float(np.sum(deviations**2 / expected))
    df = (observed.shape[0] - 1) * (observed.shape[1] - 1)
    return TestResult(statistic, _chi2_sf(statistic, df), df, "chi-square")


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Mann-Whitney U (statistic for the first group), normal approximation.

    U = R_a - n_a(n_a+1)/2 with average ranks over the pooled sample; the
    variance carries the tie correction. No continuity correction.
    """
    if len(a) == 0 or len(b) == 0:
        raise EmptyGroup("both groups must be non-empty")
    n1, n2 = len(a), len(b)
    pooled = list(a) + list(b)
    ranks = rankdata(pooled)
    r1 = float(np.sum(ranks[:n1]))
    u1 = r1 - n1 * (n1 + 1) / 2.0
    n = n1 + n2
    mean = n1 * n2 / 2.0
    variance = n1 * n2 / 12.0 * ((n + 1) - _tie_term(pooled) / (n * (n - 1)))
    if variance <= 0:
        return TestResult(u1, 1.0, None, "mann-whitney-u")
    z = (u1 - mean) / math.sqrt(variance)
    p = min(1.0, 2.0 * _norm_sf(abs(z)))
    return TestResult(u1, p, None, "mann-whitney-u")


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> TestResult:
    """Kruskal-Wallis H over pooled average ranks with tie correction."""
    if len(groups) < 2:
        raise TooFewGroups("need at least two groups")
    for group in groups:
        if len(group) == 0:
            raise EmptyGroup("all groups must be non-empty")
    pooled = [x for group in groups for x in group]
    n = len(pooled)
    ranks = rankdata(pooled)
    h = 0.0
    offset = 0
    for group in groups:
        size = len(group)
        rank_sum = float(np.sum(ranks[offset : offset + size]))
        h += rank_sum**2 / size
        offset += size
    h = 12.0 / (n * (n + 1)) * h - 3 * (n + 1)
    correction = 1.0 - _tie_term(pooled) / (n**3 - n)
    h = 0.0 if correction == 0.0 else h / correction
    df = len(groups) - 1
    return TestResult(h, _chi2_sf(h, df), df, "kruskal-wallis")


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation: Pearson correlation of average-ranked data.

    Equals 1 - 6*sum(d^2)/(n^3 - n) when there are no ties.
    """
    if len(x) != len(y):
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise LengthMismatch("need at least two paired observations")
    rx = rankdata(x)
    ry = rankdata(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    denom = math.sqrt(float(np.sum(dx**2)) * float(np.sum(dy**2)))
    if denom == 0:
        raise DegenerateTable("a constant sequence has no rank correlation")
    return float(np.sum(dx * dy)) / denom


def bonferroni(alpha: float, m: int) -> float:
    """Corrected per-comparison significance level: alpha / m."""
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise InvalidArgs("m must be an integer >= 1")
    if not 0 < alpha < 1:
        raise InvalidArgs("alpha must lie strictly between 0 and 1")
    return alpha / m


def impact_distribution(cases) -> dict[int, int]:
    """Histogram of aggregate impact over validated cases; keys 1..5."""
    histogram = {score: 0 for score in range(1, 6)}
    for case in cases:
        outcome = getattr(case, "outcome", None)
        if outcome is None or outcome.aggregate_impact is None:
            continue
        if getattr(outcome.decision, "value", outcome.decision) == "Validated":
            histogram[outcome.aggregate_impact] += 1
    return histogram


# -- offline CSV analysis -------------------------------------------------------


def load_observations(path) -> list[tuple[str, str, float]]:
    """Read (group, label, value) rows from a CSV with a header row."""
    rows = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        required = {"group", "label", "value"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise InvalidArgs(f"CSV must have columns {sorted(required)}")
        for record in reader:
            rows.append((record["group"], record["label"], float(record["value"])))
    return rows


def analyze_observations(
    rows: Sequence[tuple[str, str, float]], alpha: float = 0.05
) -> dict:
    """The survey-analysis pipeline: omnibus test across groups, then
    Bonferroni-corrected pairwise comparisons when the omnibus is significant,
    plus a group x label chi-square when labels vary."""
    by_group: dict[str, list[float]] = {}
    for group, _label, value in rows:
        by_group.setdefault(group, []).append(value)
    group_names = sorted(by_group)
    if len(group_names) < 2:
        raise TooFewGroups("need observations from at least two groups")

    report: dict = {
        "groups": {
            name: {
                "n": len(by_group[name]),
                "mean": float(np.mean(by_group[name])),
                "median": float(np.median(by_group[name])),
            }
            for name in group_names
        }
    }
    if len(group_names) == 2:
        omnibus = mann_whitney_u(by_group[group_names[0]], by_group[group_names[1]])
    else:
        omnibus = kruskal_wallis([by_group[name] for name in group_names])
    report["omnibus"] = omnibus.export()

    pairs = [
        (group_names[i], group_names[j])
        for i in range(len(group_names))
        for j in range(i + 1, len(group_names))
    ]
    if omnibus.p_value < alpha and len(group_names) > 2:
        corrected = bonferroni(alpha, len(pairs))
        report["post_hoc"] = {
            "adjusted_alpha": corrected,
            "comparisons": [
                {
                    "groups": [first, second],
                    **mann_whitney_u(by_group[first], by_group[second]).export(),
                }
                for first, second in pairs
            ],
        }

    labels = sorted({label for _group, label, _value in rows})
    if len(labels) >= 2:
        counts = {
            (group, label): 0 for group in group_names for label in labels
        }
        for group, label, _value in rows:
            counts[(group, label)] += 1
        table = [[counts[(group, label)] for label in labels] for group in group_names]
        try:
            report["group_label_association"] = chi_square(table).export()
        except DegenerateTable:
            pass
    return report


def analyze_csv(path, alpha: float = 0.05) -> dict:
    return analyze_observations(load_observations(path), alpha)
