"""Independent brute-force reference implementations used to cross-check the
engine. Everything here is written from the metric definitions with plain
loops, deliberately avoiding the package's computation paths."""
from __future__ import annotations

import math


def rates_oracle(counts: dict) -> dict:
    peak = None
    for c in counts.values():
        if peak is None or c > peak:
            peak = c
    return {k: v / peak for k, v in counts.items()}


def variable_rr_oracle(counts: dict) -> float:
    rates = rates_oracle(counts)
    total = 0.0
    for r in rates.values():
        total += r
    return total / len(rates)


def overall_rr_oracle(counts_by_variable: dict) -> float:
    total = 0.0
    for counts in counts_by_variable.values():
        total += variable_rr_oracle(counts)
    return total / len(counts_by_variable)


def overall_cr_oracle(counts_by_variable: dict, threshold: int) -> float:
    covered = 0
    total = 0
    for counts in counts_by_variable.values():
        for c in counts.values():
            total += 1
            if c >= threshold:
                covered += 1
    return covered / total


def segment_counts_oracle(dataset, variable: str, indices) -> dict:
    """Count by scanning every row and binning it by hand."""
    var = dataset.variable(variable)
    j = [s.name for s in dataset.schema].index(variable)
    if var.kind == "continuous":
        labels = []
        edges = var.bin_edges
        for i in range(len(edges) - 1):
            labels.append(var.segments()[i].label)
        counts = {label: 0 for label in labels}
        for i in indices:
            v = dataset.rows[i][j]
            for b in range(len(edges) - 1):
                if edges[b] <= v < edges[b + 1]:
                    counts[labels[b]] += 1
                    break
        return counts
    counts = {c: 0 for c in var.categories}
    for i in indices:
        counts[dataset.rows[i][j]] += 1
    return counts


def quantile_oracle(values, q: float) -> float:
    vals = sorted(values)
    n = len(vals)
    if n == 1:
        return float(vals[0])
    h = (n - 1) * q
    lo = int(math.floor(h))
    hi = lo + 1 if lo + 1 < n else n - 1
    return vals[lo] + (h - lo) * (vals[hi] - vals[lo])


def fences_oracle(values) -> tuple[float, float]:
    q1 = quantile_oracle(values, 0.25)
    q3 = quantile_oracle(values, 0.75)
    iqr = q3 - q1
    return q1 - 1.5 * iqr, q3 + 1.5 * iqr


def outlier_fraction_oracle(dataset) -> float:
    cont = [s.name for s in dataset.schema if s.kind == "continuous"]
    names = [s.name for s in dataset.schema]
    orig = [i for i, p in enumerate(dataset.provenance) if p == "original"]
    scope = orig if orig else range(len(dataset.rows))
    fences = {}
    for name in cont:
        j = names.index(name)
        fences[name] = fences_oracle([dataset.rows[i][j] for i in scope])
    hits = 0
    for row in dataset.rows:
        flagged = False
        for name in cont:
            j = names.index(name)
            lo, hi = fences[name]
            if row[j] < lo or row[j] > hi:
                flagged = True
        hits += flagged
    return hits / len(dataset.rows)


def duplicate_fraction_oracle(dataset) -> float:
    distinct = set()
    for row in dataset.rows:
        distinct.add(tuple(row))
    return 1.0 - len(distinct) / len(dataset.rows)


def pearson_oracle(xs, ys) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxy = sxx = syy = 0.0
    for x, y in zip(xs, ys):
        sxy += (x - mx) * (y - my)
        sxx += (x - mx) ** 2
        syy += (y - my) ** 2
    if sxx == 0 or syy == 0:
        return 0.0
    return abs(sxy / math.sqrt(sxx * syy))


def cramers_v_oracle(a, b) -> float:
    cats_a = sorted(set(a))
    cats_b = sorted(set(b))
    if len(cats_a) < 2 or len(cats_b) < 2:
        return 0.0
    n = len(a)
    chi2 = 0.0
    for ca in cats_a:
        for cb in cats_b:
            obs = sum(1 for x, y in zip(a, b) if x == ca and y == cb)
            exp = sum(1 for x in a if x == ca) * sum(1 for y in b if y == cb) / n
            if exp > 0:
                chi2 += (obs - exp) ** 2 / exp
    return math.sqrt(chi2 / (n * (min(len(cats_a), len(cats_b)) - 1)))


def correlation_ratio_oracle(groups, values) -> float:
    n = len(values)
    mean = sum(values) / n
    ss_total = sum((v - mean) ** 2 for v in values)
    if ss_total == 0:
        return 0.0
    ss_between = 0.0
    for g in set(groups):
        sub = [v for gi, v in zip(groups, values) if gi == g]
        gm = sum(sub) / len(sub)
        ss_between += len(sub) * (gm - mean) ** 2
    return math.sqrt(ss_between / ss_total)


def correlation_severity_oracle(dataset, threshold: float = 0.8) -> float:
    predictors = [s for s in dataset.schema if s.role == "predictor"]
    names = [s.name for s in dataset.schema]
    pairs = 0
    flagged = 0
    for i in range(len(predictors)):
        for j in range(i + 1, len(predictors)):
            a, b = predictors[i], predictors[j]
            pairs += 1
            col_a = [row[names.index(a.name)] for row in dataset.rows]
            col_b = [row[names.index(b.name)] for row in dataset.rows]
            if a.kind == "continuous" and b.kind == "continuous":
                assoc = pearson_oracle(col_a, col_b)
            elif a.kind != "continuous" and b.kind != "continuous":
                assoc = cramers_v_oracle(col_a, col_b)
            elif a.kind == "continuous":
                assoc = correlation_ratio_oracle(col_b, col_a)
            else:
                assoc = correlation_ratio_oracle(col_a, col_b)
            if assoc > threshold:
                flagged += 1
    return flagged / pairs if pairs else 0.0


def skewness_oracle(values) -> float:
    n = len(values)
    mean = sum(values) / n
    m2 = sum((v - mean) ** 2 for v in values) / n
    if m2 == 0:
        return 0.0
    m3 = sum((v - mean) ** 3 for v in values) / n
    return m3 / m2 ** 1.5


def skew_severity_oracle(dataset, threshold: float = 1.0) -> float:
    cont = [s for s in dataset.schema if s.kind == "continuous" and s.role == "predictor"]
    if not cont:
        return 0.0
    names = [s.name for s in dataset.schema]
    flagged = 0
    for s in cont:
        col = [row[names.index(s.name)] for row in dataset.rows]
        if abs(skewness_oracle(col)) > threshold:
            flagged += 1
    return flagged / len(cont)


def imbalance_oracle(dataset) -> float:
    target = next(s for s in dataset.schema if s.role == "target")
    j = [s.name for s in dataset.schema].index(target.name)
    counts = {c: 0 for c in target.categories}
    for row in dataset.rows:
        counts[row[j]] += 1
    return 1.0 - min(counts.values()) / max(counts.values())


def segment_accuracy_oracle(model, dataset, variable: str) -> dict:
    """Loop every heldout row one at a time through single-row predict."""
    from debiaswb.model import predict

    var = dataset.variable(variable)
    names = [s.name for s in dataset.schema]
    j = names.index(variable)
    tj = names.index(next(s.name for s in dataset.schema if s.role == "target"))
    tally: dict = {}
    for i, tag in enumerate(dataset.split_tag):
        if tag != "heldout":
            continue
        row = dataset.rows[i]
        seg = None
        for candidate in var.segments():
            if candidate.contains(row[j]):
                seg = candidate.label
        truth = row[tj]
        pred = predict(model, row, dataset).predicted_class
        ok, total = tally.get((seg, truth), (0, 0))
        tally[(seg, truth)] = (ok + (pred == truth), total + 1)
    out: dict = {}
    for (seg, truth), (ok, total) in tally.items():
        out.setdefault(seg, {})[truth] = ok / total
    return out
