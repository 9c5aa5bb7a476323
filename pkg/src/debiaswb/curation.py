"""Validation and refinement of generated batches, plus interaction-drift checks.

Edits and deletions on a pending batch are append-only log entries; replaying
the log from the pristine batch must reproduce the current batch exactly,
which keeps every refinement reversible and auditable.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .augment import GeneratedBatch
from .dataset import TabularDataset
from .errors import OutOfDomain, SchemaMismatch
from .model import ModelArtifact, Prediction, predict, predict_rows
from .quality import iqr_fences, quality_report

DEFAULT_DRIFT_THRESHOLD = 0.15


@dataclass(frozen=True)
class EditLogEntry:
    row_id: str
    kind: str                    # edit | delete
    variable: str | None = None
    old_value: object = None
    new_value: object = None
    prediction: Prediction | None = None
    timestamp: float = 0.0

    def to_dict(self) -> dict:
        return {
            "row_id": self.row_id,
            "kind": self.kind,
            "variable": self.variable,
            "old_value": self.old_value,
            "new_value": self.new_value,
            "prediction": self.prediction.to_dict() if self.prediction else None,
            "timestamp": self.timestamp,
        }


def _refresh_batch(batch: GeneratedBatch, rows: TabularDataset, parent_ids, model: ModelArtifact,
                   source: TabularDataset) -> GeneratedBatch:
    predictions = tuple(predict_rows(model, rows, range(len(rows))))
    if len(rows):
        target_j = rows.target_index
        hits = sum(p.predicted_class == r[target_j] for p, r in zip(predictions, rows.rows))
        est_acc = hits / len(rows)
        orig = [i for i, p in enumerate(source.provenance) if p == "original"]
        est_quality = quality_report(rows, fences=iqr_fences(source, orig or None))
    else:
        est_acc = None
        est_quality = None
    return replace(
        batch,
        rows=rows,
        predictions=predictions,
        parent_ids=parent_ids,
        estimated_accuracy=est_acc,
        estimated_quality=est_quality,
    )


def what_if(
    batch: GeneratedBatch,
    row_id: str,
    variable: str,
    new_value,
    model: ModelArtifact,
    clock: Callable[[], float] = time.time,
) -> tuple[Prediction, EditLogEntry]:
    """Re-predict one row with a single cell changed, without committing.

    The returned log entry is what ``apply_edit`` appends when the expert
    commits the change.
    """
    i = batch.rows.index_of(row_id)
    var = batch.rows.variable(variable)
    if not var.contains(new_value):
        raise OutOfDomain(f"value {new_value!r} outside the domain of {variable!r}")
    row = list(batch.rows.rows[i])
    j = batch.rows._col_index[variable]
    old_value = row[j]
    row[j] = new_value
    prediction = predict(model, tuple(row), batch.rows)
    entry = EditLogEntry(
        row_id=row_id,
        kind="edit",
        variable=variable,
        old_value=old_value,
        new_value=new_value,
        prediction=prediction,
        timestamp=clock(),
    )
    return prediction, entry


def apply_edit(
    batch: GeneratedBatch,
    entry: EditLogEntry,
    model: ModelArtifact,
    source: TabularDataset,
) -> GeneratedBatch:
    """Commit one logged edit or deletion; returns the refreshed batch."""
    if entry.kind == "delete":
        idx = batch.rows.index_of(entry.row_id)
        rows = batch.rows.without_rows([entry.row_id])
        parents = batch.parent_ids[:idx] + batch.parent_ids[idx + 1:]
        return _refresh_batch(batch, rows, parents, model, source)
    rows = batch.rows.with_cell(entry.row_id, entry.variable, entry.new_value, provenance="edited")
    return _refresh_batch(batch, rows, batch.parent_ids, model, source)


def delete_entry(row_id: str, clock: Callable[[], float] = time.time) -> EditLogEntry:
    return EditLogEntry(row_id=row_id, kind="delete", timestamp=clock())


def replay(
    pristine: GeneratedBatch,
    log: Sequence[EditLogEntry],
    model: ModelArtifact,
    source: TabularDataset,
) -> GeneratedBatch:
    """Reapply the whole log to the pristine batch."""
    batch = pristine
    for entry in log:
        batch = apply_edit(batch, entry, model, source)
    return batch


# -- filtering / sorting ------------------------------------------------------

_OPS = {
    "eq": lambda a, b: a == b,
    "ne": lambda a, b: a != b,
    "lt": lambda a, b: a < b,
    "le": lambda a, b: a <= b,
    "gt": lambda a, b: a > b,
    "ge": lambda a, b: a >= b,
    "in": lambda a, b: a in b,
}


@dataclass(frozen=True)
class RowView:
    row_id: str
    cells: dict
    provenance: str
    prediction: Prediction

    def field(self, name: str):
        if name == "confidence":
            return self.prediction.confidence
        if name == "predicted":
            return self.prediction.predicted_class
        if name == "row_id":
            return self.row_id
        if name in self.cells:
            return self.cells[name]
        raise SchemaMismatch(f"unknown filter field {name!r}")

    def to_dict(self) -> dict:
        return {
            "row_id": self.row_id,
            "cells": dict(self.cells),
            "provenance": self.provenance,
            "prediction": self.prediction.to_dict(),
        }


def batch_views(batch: GeneratedBatch) -> list[RowView]:
    names = [s.name for s in batch.rows.schema]
    return [
        RowView(
            row_id=batch.rows.row_ids[i],
            cells=dict(zip(names, batch.rows.rows[i])),
            provenance=batch.rows.provenance[i],
            prediction=batch.predictions[i],
        )
        for i in range(len(batch.rows))
    ]


def filter_sort(
    batch: GeneratedBatch,
    predicate: Sequence[dict] | Callable[[RowView], bool] | None = None,
    ordering: Sequence[tuple[str, str]] | None = None,
) -> list[RowView]:
    """Non-destructive filtered/sorted view over the batch rows.

    ``predicate`` is either a callable or a list of clauses
    ``{"field", "op", "value"}`` over variables, ``confidence`` and
    ``predicted``; all clauses must hold. Sorting is stable.
    """
    views = batch_views(batch)
    if callable(predicate):
        views = [v for v in views if predicate(v)]
    elif predicate:
        for clause in predicate:
            op = _OPS.get(clause.get("op", "eq"))
            if op is None:
                raise SchemaMismatch(f"unknown filter op {clause.get('op')!r}")
            field_name = clause["field"]
            value = clause["value"]
            views = [v for v in views if op(v.field(field_name), value)]
    if ordering:
        for field_name, direction in reversed(list(ordering)):
            if direction not in ("asc", "desc"):
                raise SchemaMismatch(f"sort direction must be asc or desc, got {direction!r}")
            views.sort(key=lambda v: v.field(field_name), reverse=direction == "desc")
    return views


# -- interaction drift --------------------------------------------------------

@dataclass(frozen=True)
class DriftReport:
    per_variable: dict           # variable -> total variation distance in [0,1]
    flagged: tuple
    threshold: float
    histograms: dict             # variable -> {labels, before, after}

    def to_dict(self) -> dict:
        return {
            "per_variable": dict(self.per_variable),
            "flagged": list(self.flagged),
            "threshold": self.threshold,
            "histograms": {
                k: {"labels": list(v["labels"]), "before": list(v["before"]), "after": list(v["after"])}
                for k, v in self.histograms.items()
            },
        }


def drift_report(
    original_train: TabularDataset,
    merged: TabularDataset,
    threshold: float = DEFAULT_DRIFT_THRESHOLD,
) -> DriftReport:
    """Per-variable total variation distance between segment histograms.

    Zero when the merged distribution matches the original; symmetric in its
    histogram arguments. Flags variables whose score exceeds the threshold.
    """
    if [s.to_dict() for s in original_train.schema] != [s.to_dict() for s in merged.schema]:
        raise SchemaMismatch("drift comparison requires identical schemas")
    if len(original_train) == 0 or len(merged) == 0:
        raise SchemaMismatch("drift comparison requires non-empty datasets")

    per_variable: dict = {}
    histograms: dict = {}
    flagged = []
    for var in original_train.predictors:
        labels = [seg.label for seg in var.segments()]
        before = {label: 0 for label in labels}
        after = {label: 0 for label in labels}
        for v in original_train.column(var.name):
            before[var.segment_of(v).label] += 1
        for v in merged.column(var.name):
            after[var.segment_of(v).label] += 1
        nb = sum(before.values())
        na = sum(after.values())
        tv = 0.5 * sum(abs(before[l] / nb - after[l] / na) for l in labels)
        per_variable[var.name] = tv
        histograms[var.name] = {"labels": labels,
                                "before": [before[l] for l in labels],
                                "after": [after[l] for l in labels]}
        if tv > threshold:
            flagged.append(var.name)
    return DriftReport(
        per_variable=per_variable,
        flagged=tuple(flagged),
        threshold=threshold,
        histograms=histograms,
    )
