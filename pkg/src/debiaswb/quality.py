"""Dataset quality scoring across five issue classes, equally weighted.

Severities, each in [0,1]:

* outliers      — fraction of rows with any continuous cell beyond the
                  1.5*IQR fences (fences frozen from the original rows),
* duplicates    — 1 - distinct_rows / total_rows,
* correlation   — fraction of predictor pairs with association above the
                  threshold (|Pearson| continuous-continuous, Cramer's V
                  categorical-categorical, correlation ratio mixed),
* skew          — fraction of continuous variables with |g1| above the
                  threshold (Fisher-Pearson moment skewness),
* imbalance     — 1 - minority / majority target class counts.

Overall score = 1 - mean of the five severities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .dataset import TabularDataset
from .errors import EmptyDataset
from .schema import quantile

DEFAULT_CORRELATION_THRESHOLD = 0.8
DEFAULT_SKEW_THRESHOLD = 1.0
IQR_MULTIPLIER = 1.5


@dataclass(frozen=True)
class FlaggedPair:
    variable_a: str
    variable_b: str
    association: float
    measure: str  # pearson | cramers_v | correlation_ratio

    def to_dict(self) -> dict:
        return {
            "variable_a": self.variable_a,
            "variable_b": self.variable_b,
            "association": self.association,
            "measure": self.measure,
        }


@dataclass(frozen=True)
class QualityReport:
    outlier_severity: float
    duplicate_severity: float
    correlation_severity: float
    skew_severity: float
    imbalance_severity: float
    overall: float
    flagged_pairs: tuple
    flagged_rows: tuple  # (row_id, issue) pairs

    def severities(self) -> dict:
        return {
            "outliers": self.outlier_severity,
            "duplicates": self.duplicate_severity,
            "correlation": self.correlation_severity,
            "skew": self.skew_severity,
            "imbalance": self.imbalance_severity,
        }

    def to_dict(self) -> dict:
        return {
            "severities": self.severities(),
            "overall": self.overall,
            "flagged_pairs": [p.to_dict() for p in self.flagged_pairs],
            "flagged_rows": [{"row_id": rid, "issue": issue} for rid, issue in self.flagged_rows],
        }


@dataclass(frozen=True)
class QualityDelta:
    outliers: float
    duplicates: float
    correlation: float
    skew: float
    imbalance: float
    overall: float

    def to_dict(self) -> dict:
        return {
            "outliers": self.outliers,
            "duplicates": self.duplicates,
            "correlation": self.correlation,
            "skew": self.skew,
            "imbalance": self.imbalance,
            "overall": self.overall,
        }


def iqr_fences(dataset: TabularDataset, indices: Sequence[int] | None = None) -> dict:
    """Per continuous variable: (Q1 - 1.5*IQR, Q3 + 1.5*IQR)."""
    fences = {}
    for s in dataset.schema:
        if s.kind != "continuous":
            continue
        vals = sorted(float(v) for v in dataset.column(s.name, indices))
        if not vals:
            continue
        q1 = quantile(vals, 0.25)
        q3 = quantile(vals, 0.75)
        iqr = q3 - q1
        fences[s.name] = (q1 - IQR_MULTIPLIER * iqr, q3 + IQR_MULTIPLIER * iqr)
    return fences


def pearson_abs(x: np.ndarray, y: np.ndarray) -> float:
    xd = x - x.mean()
    yd = y - y.mean()
    denom = math.sqrt(float((xd * xd).sum()) * float((yd * yd).sum()))
    if denom == 0.0:
        return 0.0
    return abs(float((xd * yd).sum()) / denom)


def cramers_v(a: Sequence, b: Sequence) -> float:
    cats_a = sorted(set(a))
    cats_b = sorted(set(b))
    r, c = len(cats_a), len(cats_b)
    if min(r, c) < 2:
        return 0.0
    n = len(a)
    ia = {v: i for i, v in enumerate(cats_a)}
    ib = {v: i for i, v in enumerate(cats_b)}
    obs = np.zeros((r, c))
    for va, vb in zip(a, b):
        obs[ia[va], ib[vb]] += 1
    row = obs.sum(axis=1, keepdims=True)
    col = obs.sum(axis=0, keepdims=True)
    exp = row @ col / n
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(exp > 0, (obs - exp) ** 2 / exp, 0.0)
    chi2 = float(terms.sum())
    return math.sqrt(chi2 / (n * (min(r, c) - 1)))


def correlation_ratio(groups: Sequence, values: np.ndarray) -> float:
    mean = float(values.mean())
    ss_total = float(((values - mean) ** 2).sum())
    if ss_total == 0.0:
        return 0.0
    ss_between = 0.0
    for g in sorted(set(groups)):
        sel = np.asarray([gi == g for gi in groups])
        sub = values[sel]
        ss_between += len(sub) * (float(sub.mean()) - mean) ** 2
    return math.sqrt(ss_between / ss_total)


def skewness(x: np.ndarray) -> float:
    m = float(x.mean())
    d = x - m
    m2 = float((d * d).mean())
    if m2 == 0.0:
        return 0.0
    m3 = float((d * d * d).mean())
    return m3 / m2 ** 1.5


def quality_report(
    dataset: TabularDataset,
    fences: Mapping | None = None,
    correlation_threshold: float = DEFAULT_CORRELATION_THRESHOLD,
    skew_threshold: float = DEFAULT_SKEW_THRESHOLD,
) -> QualityReport:
    """Score every row of the given dataset (pass a view to scope it).

    ``fences`` pins the outlier fences; when omitted they are computed from
    the rows with original provenance (falling back to all rows), so a
    session can freeze them once and keep severities comparable.
    """
    if len(dataset) == 0:
        raise EmptyDataset("cannot score an empty dataset")

    if fences is None:
        orig = [i for i, p in enumerate(dataset.provenance) if p == "original"]
        fences = iqr_fences(dataset, orig or None)

    n = len(dataset)
    flagged_rows: list[tuple[str, str]] = []

    cont = [s for s in dataset.schema if s.kind == "continuous"]
    outlier_ids = []
    for i, row in enumerate(dataset.rows):
        for s in cont:
            if s.name not in fences:
                continue
            lo, hi = fences[s.name]
            v = row[dataset._col_index[s.name]]
            if v < lo or v > hi:
                outlier_ids.append(dataset.row_ids[i])
                break
    outlier_severity = len(outlier_ids) / n
    flagged_rows.extend((rid, "outlier") for rid in outlier_ids)

    seen: set = set()
    dup_ids = []
    for i, row in enumerate(dataset.rows):
        key = tuple(row)
        if key in seen:
            dup_ids.append(dataset.row_ids[i])
        else:
            seen.add(key)
    duplicate_severity = 1.0 - len(seen) / n
    flagged_rows.extend((rid, "duplicate") for rid in dup_ids)

    predictors = dataset.predictors
    flagged_pairs: list[FlaggedPair] = []
    pair_count = 0
    for ai in range(len(predictors)):
        for bi in range(ai + 1, len(predictors)):
            a, b = predictors[ai], predictors[bi]
            pair_count += 1
            col_a = dataset.column(a.name)
            col_b = dataset.column(b.name)
            if a.kind == "continuous" and b.kind == "continuous":
                assoc = pearson_abs(np.asarray(col_a, dtype=float), np.asarray(col_b, dtype=float))
                measure = "pearson"
            elif a.kind != "continuous" and b.kind != "continuous":
                assoc = cramers_v(col_a, col_b)
                measure = "cramers_v"
            elif a.kind == "continuous":
                assoc = correlation_ratio(col_b, np.asarray(col_a, dtype=float))
                measure = "correlation_ratio"
            else:
                assoc = correlation_ratio(col_a, np.asarray(col_b, dtype=float))
                measure = "correlation_ratio"
            if assoc > correlation_threshold:
                flagged_pairs.append(FlaggedPair(a.name, b.name, assoc, measure))
    correlation_severity = len(flagged_pairs) / pair_count if pair_count else 0.0

    cont_predictors = [s for s in predictors if s.kind == "continuous"]
    if cont_predictors:
        skewed = sum(
            abs(skewness(np.asarray(dataset.column(s.name), dtype=float))) > skew_threshold
            for s in cont_predictors
        )
        skew_severity = skewed / len(cont_predictors)
    else:
        skew_severity = 0.0

    target_counts = {c: 0 for c in dataset.target.categories}
    for row in dataset.rows:
        target_counts[row[dataset.target_index]] += 1
    # absent classes count as zero, so a single-class set scores severity 1
    imbalance_severity = 1.0 - min(target_counts.values()) / max(target_counts.values())

    severities = (outlier_severity, duplicate_severity, correlation_severity,
                  skew_severity, imbalance_severity)
    overall = 1.0 - sum(severities) / 5.0

    return QualityReport(
        outlier_severity=outlier_severity,
        duplicate_severity=duplicate_severity,
        correlation_severity=correlation_severity,
        skew_severity=skew_severity,
        imbalance_severity=imbalance_severity,
        overall=overall,
        flagged_pairs=tuple(flagged_pairs),
        flagged_rows=tuple(flagged_rows),
    )


def delta_quality(before: QualityReport, after: QualityReport) -> QualityDelta:
    """Componentwise after-minus-before severity deltas."""
    return QualityDelta(
        outliers=after.outlier_severity - before.outlier_severity,
        duplicates=after.duplicate_severity - before.duplicate_severity,
        correlation=after.correlation_severity - before.correlation_severity,
        skew=after.skew_severity - before.skew_severity,
        imbalance=after.imbalance_severity - before.imbalance_severity,
        overall=after.overall - before.overall,
    )
