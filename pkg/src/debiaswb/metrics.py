"""Representation rate, coverage and per-segment model accuracy.

The representation rate of a segment is its row count divided by the largest
segment count of the same variable, so the best-represented segment always
scores 1.0. A segment is covered when its count reaches the coverage
threshold. Aggregates:

* overall RR: mean over predictor variables of the mean segment rate
  (configurable to a flat mean over all segments),
* overall CR: fraction of covered segments across all predictor variables.

Both aggregation formulas are workbench choices; only the per-segment rate
definition is fixed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .dataset import TabularDataset, segment_counts
from .errors import AllZeroCounts, ModelStale, TooFewRows
from .model import ModelArtifact, predict_rows
from .schema import Segment

RR_SCOPES = ("variables", "segments")


def default_coverage_threshold(train_rows: int) -> int:
    """Absolute count a segment must reach to be considered covered."""
    return max(30, train_rows // 100)


def representation_rates(counts: Mapping) -> dict:
    """Per-segment count divided by the maximum count of the variable."""
    if not counts:
        raise AllZeroCounts("no segments given")
    if any(c < 0 for c in counts.values()):
        raise AllZeroCounts("negative segment count")
    peak = max(counts.values())
    if peak == 0:
        raise AllZeroCounts("every segment count is zero")
    return {seg: c / peak for seg, c in counts.items()}


def coverage(counts: Mapping, threshold: int) -> dict:
    """Covered iff the segment count reaches the threshold."""
    if threshold < 1:
        raise TooFewRows(f"coverage threshold must be >= 1, got {threshold}")
    return {seg: c >= threshold for seg, c in counts.items()}


@dataclass(frozen=True)
class SegmentStats:
    segment: Segment
    count: int
    representation_rate: float
    covered: bool
    coverage_threshold: int
    accuracy_by_outcome: dict  # target class -> accuracy; missing key = no heldout rows

    def to_dict(self) -> dict:
        return {
            "segment": self.segment.to_dict(),
            "count": self.count,
            "representation_rate": self.representation_rate,
            "covered": self.covered,
            "coverage_threshold": self.coverage_threshold,
            "accuracy_by_outcome": dict(self.accuracy_by_outcome),
        }


@dataclass(frozen=True)
class QuickInsight:
    variable: str
    segment: str
    reason: str  # low_rr | low_coverage | low_accuracy
    score: float

    def to_dict(self) -> dict:
        return {"variable": self.variable, "segment": self.segment,
                "reason": self.reason, "score": self.score}


@dataclass(frozen=True)
class BiasReport:
    per_variable: dict  # variable -> tuple[SegmentStats, ...]
    variable_rr: dict   # variable -> mean segment rate
    overall_rr: float
    overall_cr: float
    coverage_threshold: int
    quick_insights: tuple

    def to_dict(self) -> dict:
        return {
            "overall_rr": self.overall_rr,
            "overall_cr": self.overall_cr,
            "coverage_threshold": self.coverage_threshold,
            "variables": {
                name: {
                    "rr": self.variable_rr[name],
                    "segments": [s.to_dict() for s in stats],
                }
                for name, stats in self.per_variable.items()
            },
            "quick_insights": [q.to_dict() for q in self.quick_insights],
        }


def _heldout_accuracy_cells(
    dataset: TabularDataset,
    variable: str,
    heldout_hits: Sequence[tuple[int, bool]],
) -> dict:
    """(segment label, true class) -> (correct, total) over heldout rows.

    ``heldout_hits`` pairs each heldout row index with whether the model got
    it right, so predictions are computed once for the whole report.
    """
    var = dataset.variable(variable)
    col_j = dataset._col_index[variable]
    target_j = dataset.target_index
    cells: dict = {}
    for i, hit in heldout_hits:
        row = dataset.rows[i]
        seg = var.segment_of(row[col_j]).label
        truth = row[target_j]
        correct, total = cells.get((seg, truth), (0, 0))
        cells[(seg, truth)] = (correct + hit, total + 1)
    return cells


def bias_report(
    dataset: TabularDataset,
    model: ModelArtifact,
    threshold: int | None = None,
    rr_scope: str = "variables",
    top_k: int = 10,
) -> BiasReport:
    """Full per-variable bias profile plus ranked Quick Insights.

    Segment counts come from the train rows; per-segment accuracy only from
    heldout rows, broken down per true outcome.
    """
    if not dataset.is_split:
        raise TooFewRows("dataset must be split before reporting")
    if model.train_snapshot_hash != dataset.train_digest():
        raise ModelStale("model was trained on a different train snapshot")
    if rr_scope not in RR_SCOPES:
        raise ValueError(f"rr_scope must be one of {RR_SCOPES}")

    train_n = len(dataset.train_indices)
    if threshold is None:
        threshold = default_coverage_threshold(train_n)

    heldout_idx = dataset.heldout_indices
    preds = predict_rows(model, dataset, heldout_idx)
    target_j = dataset.target_index
    heldout_hits = [
        (i, p.predicted_class == dataset.rows[i][target_j])
        for i, p in zip(heldout_idx, preds)
    ]

    per_variable: dict = {}
    variable_rr: dict = {}
    covered_count = 0
    total_segments = 0
    all_rates: list[float] = []
    insights: list[QuickInsight] = []

    for var in dataset.predictors:
        counts = segment_counts(dataset, var.name, dataset.train_indices)
        rates = representation_rates(counts)
        covered = coverage(counts, threshold)
        acc_cells = _heldout_accuracy_cells(dataset, var.name, heldout_hits)

        stats = []
        for seg in var.segments():
            label = seg.label
            acc = {}
            for (cell_seg, truth), (ok, total) in acc_cells.items():
                if cell_seg == label:
                    acc[truth] = ok / total
            stats.append(SegmentStats(
                segment=seg,
                count=counts[label],
                representation_rate=rates[label],
                covered=covered[label],
                coverage_threshold=threshold,
                accuracy_by_outcome=acc,
            ))
            covered_count += covered[label]
            total_segments += 1
            all_rates.append(rates[label])

            candidates = [("low_rr", rates[label])]
            if not covered[label]:
                candidates.append(("low_coverage", counts[label] / threshold))
            if acc:
                candidates.append(("low_accuracy", min(acc.values())))
            reason, score = min(candidates, key=lambda rs: rs[1])
            if score < 1.0:
                insights.append(QuickInsight(var.name, label, reason, score))

        per_variable[var.name] = tuple(stats)
        variable_rr[var.name] = sum(rates.values()) / len(rates)

    if rr_scope == "variables":
        overall_rr = sum(variable_rr.values()) / len(variable_rr)
    else:
        overall_rr = sum(all_rates) / len(all_rates)
    overall_cr = covered_count / total_segments

    insights.sort(key=lambda q: (q.score, q.variable, q.segment))
    return BiasReport(
        per_variable=per_variable,
        variable_rr=variable_rr,
        overall_rr=overall_rr,
        overall_cr=overall_cr,
        coverage_threshold=threshold,
        quick_insights=tuple(insights[:top_k]),
    )


def segment_count_table(dataset: TabularDataset) -> dict:
    """Train-row counts per segment for every predictor variable."""
    return {
        var.name: segment_counts(dataset, var.name, dataset.train_indices)
        for var in dataset.predictors
    }


def aggregate_from_counts(
    counts_by_variable: Mapping[str, Mapping[str, int]],
    threshold: int,
    rr_scope: str = "variables",
) -> tuple[float, float]:
    """(overall RR, overall CR) straight from a count table.

    Shared by the report path and the grid-search baseline, which simulates
    merges at the count level without retraining.
    """
    var_rrs = []
    all_rates = []
    covered = 0
    total = 0
    for counts in counts_by_variable.values():
        rates = representation_rates(counts)
        var_rrs.append(sum(rates.values()) / len(rates))
        all_rates.extend(rates.values())
        for c in counts.values():
            covered += c >= threshold
            total += 1
    rr = sum(var_rrs) / len(var_rrs) if rr_scope == "variables" else sum(all_rates) / len(all_rates)
    return rr, covered / total


def calibrate_coverage_threshold(
    dataset: TabularDataset,
    model: ModelArtifact,
    candidates: Sequence[int],
) -> list[dict]:
    """Sweep candidate thresholds; report heldout accuracy per stratum.

    For each threshold, heldout rows are split by whether every segment they
    fall in is covered, giving an empirical handle for picking the threshold.
    """
    if model.train_snapshot_hash != dataset.train_digest():
        raise ModelStale("model was trained on a different train snapshot")
    idxs = dataset.heldout_indices
    preds = predict_rows(model, dataset, idxs)
    counts_by_var = segment_count_table(dataset)
    out = []
    for threshold in candidates:
        cov_ok = cov_total = unc_ok = unc_total = 0
        covered_segments = 0
        total_segments = 0
        for counts in counts_by_var.values():
            for c in counts.values():
                covered_segments += c >= threshold
                total_segments += 1
        for i, pred in zip(idxs, preds):
            row = dataset.rows[i]
            in_covered = True
            for var in dataset.predictors:
                seg = var.segment_of(row[dataset._col_index[var.name]]).label
                if counts_by_var[var.name][seg] < threshold:
                    in_covered = False
                    break
            hit = pred.predicted_class == row[dataset.target_index]
            if in_covered:
                cov_ok += hit
                cov_total += 1
            else:
                unc_ok += hit
                unc_total += 1
        out.append({
            "threshold": threshold,
            "covered_segments": covered_segments,
            "total_segments": total_segments,
            "covered_accuracy": cov_ok / cov_total if cov_total else None,
            "uncovered_accuracy": unc_ok / unc_total if unc_total else None,
        })
    return out
