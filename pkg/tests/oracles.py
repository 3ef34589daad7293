"""Independent reference implementations used to check the stats module.

Everything here is written definitionally (explicit loops, pairwise counts,
mpmath for distribution tails) and stays independent of redress.stats.
"""

import mpmath

mpmath.mp.dps = 30


def rankdata(values):
    """Average rank of each value, by direct counting."""
    ranks = []
    for v in values:
        less = sum(1 for u in values if u < v)
        equal = sum(1 for u in values if u == v)
        # occupies positions less+1 .. less+equal; average of that run
        ranks.append(less + (equal + 1) / 2.0)
    return ranks


def chi2_sf(x, df):
    return float(mpmath.gammainc(df / 2.0, x / 2.0, mpmath.inf, regularized=True))


def norm_sf(z):
    return float(1 - mpmath.ncdf(z))


def chi_square(table):
    rows, cols = len(table), len(table[0])
    row_totals = [sum(row) for row in table]
    col_totals = [sum(table[i][j] for i in range(rows)) for j in range(cols)]
    total = sum(row_totals)
    statistic = 0.0
    for i in range(rows):
        for j in range(cols):
            expected = row_totals[i] * col_totals[j] / total
            statistic += (table[i][j] - expected) ** 2 / expected
    df = (rows - 1) * (cols - 1)
    return statistic, chi2_sf(statistic, df), df


def _tie_factor(pooled):
    n = len(pooled)
    counts = {}
    for v in pooled:
        counts[v] = counts.get(v, 0) + 1
    return 1.0 - sum(t**3 - t for t in counts.values()) / (n**3 - n)


def mann_whitney_u(a, b):
    """U for the first group by pairwise counting; normal-approximation p."""
    u = 0.0
    for x in a:
        for y in b:
            if x > y:
                u += 1.0
            elif x == y:
                u += 0.5
    n1, n2 = len(a), len(b)
    n = n1 + n2
    mean = n1 * n2 / 2.0
    variance = n1 * n2 * (n + 1) / 12.0 * _tie_factor(list(a) + list(b))
    if variance <= 0:
        return u, 1.0
    z = (u - mean) / float(mpmath.sqrt(variance))
    return u, min(1.0, 2.0 * norm_sf(abs(z)))


def kruskal_wallis(groups):
    pooled = [x for g in groups for x in g]
    n = len(pooled)
    ranks = rankdata(pooled)
    h = 0.0
    offset = 0
    for g in groups:
        rank_sum = sum(ranks[offset : offset + len(g)])
        h += rank_sum**2 / len(g)
        offset += len(g)
    h = 12.0 / (n * (n + 1)) * h - 3 * (n + 1)
    correction = _tie_factor(pooled)
    h = 0.0 if correction == 0.0 else h / correction
    df = len(groups) - 1
    return h, chi2_sf(h, df), df


def spearman(x, y):
    rx, ry = rankdata(x), rankdata(y)
    n = len(x)
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sum((rx[i] - mx) * (ry[i] - my) for i in range(n))
    vx = sum((rx[i] - mx) ** 2 for i in range(n))
    vy = sum((ry[i] - my) ** 2 for i in range(n))
    return cov / float(mpmath.sqrt(vx * vy))


def spearman_closed_form(x, y):
    """1 - 6*sum(d^2)/(n^3 - n); valid only without ties."""
    rx, ry = rankdata(x), rankdata(y)
    n = len(x)
    d2 = sum((rx[i] - ry[i]) ** 2 for i in range(n))
    return 1 - 6 * d2 / (n**3 - n)
