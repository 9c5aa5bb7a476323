"""Prediction model: training, per-sample confidence and per-segment accuracy.

The learner is the in-repo gradient-boosted tree ensemble from ``gbdt``. Each
artifact records a digest of the exact train rows it was fitted on, so every
downstream report can detect a stale model.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import TabularDataset
from .errors import (
    DegenerateTarget,
    LeakageViolation,
    ModelStale,
    SchemaDigestMismatch,
    SchemaMismatch,
    TooFewRows,
)
from .gbdt import Booster, GBDTParams
from .schema import VariableSchema

MODEL_FORMAT_VERSION = 1


def schema_digest(schema: Sequence[VariableSchema]) -> str:
    blob = json.dumps([s.to_dict() for s in schema], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


class FeatureEncoder:
    """Schema-driven row -> float vector mapping (one-hot categoricals)."""

    def __init__(self, schema: Sequence[VariableSchema]):
        self.schema = tuple(schema)
        self.predictors = tuple(s for s in self.schema if s.role == "predictor")
        self.columns: list[str] = []
        for s in self.predictors:
            if s.kind == "continuous":
                self.columns.append(s.name)
            elif s.kind == "binary":
                self.columns.append(f"{s.name}={s.categories[1]}")
            else:
                self.columns.extend(f"{s.name}={c}" for c in s.categories)

    def encode_rows(self, dataset: TabularDataset, indices: Sequence[int]) -> np.ndarray:
        X = np.zeros((len(indices), len(self.columns)), dtype=np.float64)
        col_of = dataset._col_index
        for r, i in enumerate(indices):
            X[r] = self._encode(dataset.rows[i], col_of)
        return X

    def encode_row(self, row: Sequence, dataset_cols: dict) -> np.ndarray:
        return self._encode(row, dataset_cols)

    def _encode(self, row: Sequence, col_of: dict) -> np.ndarray:
        out = np.zeros(len(self.columns), dtype=np.float64)
        j = 0
        for s in self.predictors:
            cell = row[col_of[s.name]]
            if s.kind == "continuous":
                out[j] = float(cell)
                j += 1
            elif s.kind == "binary":
                out[j] = 1.0 if cell == s.categories[1] else 0.0
                j += 1
            else:
                k = s.categories.index(cell)
                out[j + k] = 1.0
                j += len(s.categories)
        return out


@dataclass(frozen=True)
class Prediction:
    predicted_class: str
    class_probabilities: dict
    confidence: float

    def to_dict(self) -> dict:
        return {
            "predicted_class": self.predicted_class,
            "class_probabilities": dict(self.class_probabilities),
            "confidence": self.confidence,
        }


@dataclass(frozen=True)
class ModelArtifact:
    kind: str
    params: GBDTParams
    seed: int
    classes: tuple[str, ...]
    schema_digest: str
    train_snapshot_hash: str
    heldout_accuracy: float
    heldout_n: int
    booster: Booster
    encoder: FeatureEncoder

    def is_fresh(self, dataset: TabularDataset) -> bool:
        return self.train_snapshot_hash == dataset.train_digest()


def _validate_row(row: Sequence, dataset: TabularDataset) -> None:
    if len(row) != len(dataset.schema):
        raise SchemaMismatch(f"row has {len(row)} cells, schema has {len(dataset.schema)}")
    for s, cell in zip(dataset.schema, row):
        if s.role == "target":
            continue  # target cell ignored; any value (or None) accepted
        if not s.contains(cell):
            raise SchemaMismatch(f"value {cell!r} outside the domain of {s.name!r}")


def train(
    dataset: TabularDataset,
    params: GBDTParams | None = None,
    seed: int = 0,
) -> ModelArtifact:
    """Fit the ensemble on the train rows; deterministic for fixed inputs."""
    if params is None:
        params = GBDTParams()
    if not dataset.is_split:
        raise TooFewRows("dataset must be split before training")
    if dataset.train_ids & dataset.heldout_ids:
        raise LeakageViolation("train and heldout row id sets overlap")

    train_idx = dataset.train_indices
    if len(train_idx) < 4:
        raise TooFewRows(f"need at least 4 train rows, have {len(train_idx)}")
    classes = dataset.target.categories
    target_j = dataset.target_index
    labels = [dataset.rows[i][target_j] for i in train_idx]
    present = {c for c in labels}
    if len(present) < 2:
        raise DegenerateTarget("train rows contain a single target class")

    encoder = FeatureEncoder(dataset.schema)
    X = encoder.encode_rows(dataset, train_idx)
    y = np.asarray([classes.index(v) for v in labels], dtype=np.int64)
    booster = Booster.fit(X, y, len(classes), params)

    heldout_idx = dataset.heldout_indices
    if heldout_idx:
        Xh = encoder.encode_rows(dataset, heldout_idx)
        proba = booster.predict_proba(Xh)
        pred = proba.argmax(axis=1)
        truth = np.asarray([classes.index(dataset.rows[i][target_j]) for i in heldout_idx])
        heldout_accuracy = float((pred == truth).sum() / len(heldout_idx))
    else:
        heldout_accuracy = float("nan")

    return ModelArtifact(
        kind="gbdt",
        params=params,
        seed=seed,
        classes=classes,
        schema_digest=schema_digest(dataset.schema),
        train_snapshot_hash=dataset.train_digest(),
        heldout_accuracy=heldout_accuracy,
        heldout_n=len(heldout_idx),
        booster=booster,
        encoder=encoder,
    )


def _to_prediction(proba: np.ndarray, classes: tuple[str, ...]) -> Prediction:
    k = int(np.argmax(proba))
    return Prediction(
        predicted_class=classes[k],
        class_probabilities={c: float(p) for c, p in zip(classes, proba)},
        confidence=float(proba[k]),
    )


def predict(model: ModelArtifact, row: Sequence, dataset: TabularDataset) -> Prediction:
    """Predict one full-width row (the target cell, if any, is ignored)."""
    _validate_row(row, dataset)
    col_of = {s.name: j for j, s in enumerate(dataset.schema)}
    x = model.encoder.encode_row(row, col_of)[None, :]
    proba = model.booster.predict_proba(x)[0]
    return _to_prediction(proba, model.classes)


def predict_rows(model: ModelArtifact, dataset: TabularDataset, indices: Sequence[int]) -> list[Prediction]:
    if not indices:
        return []
    X = model.encoder.encode_rows(dataset, indices)
    proba = model.booster.predict_proba(X)
    return [_to_prediction(p, model.classes) for p in proba]


def segment_accuracy(model: ModelArtifact, dataset: TabularDataset, variable: str) -> dict:
    """Heldout accuracy per (segment, true outcome); empty cells stay absent."""
    if not model.is_fresh(dataset):
        raise ModelStale("model was trained on a different train snapshot")
    var = dataset.variable(variable)
    idxs = dataset.heldout_indices
    preds = predict_rows(model, dataset, idxs)
    target_j = dataset.target_index
    var_j = dataset._col_index[variable]
    cells: dict = {}
    for i, pred in zip(idxs, preds):
        row = dataset.rows[i]
        seg = var.segment_of(row[var_j]).label
        truth = row[target_j]
        ok, total = cells.get((seg, truth), (0, 0))
        cells[(seg, truth)] = (ok + (pred.predicted_class == truth), total + 1)
    out: dict = {}
    for (seg, truth), (ok, total) in cells.items():
        out.setdefault(seg, {})[truth] = ok / total
    return out


def accuracy_interval(model: ModelArtifact, z: float = 1.96) -> tuple[float, float]:
    """Normal-approximation binomial interval on the heldout accuracy."""
    p = model.heldout_accuracy
    n = model.heldout_n
    if n == 0:
        return (0.0, 1.0)
    half = z * (p * (1.0 - p) / n) ** 0.5
    return (max(0.0, p - half), min(1.0, p + half))


def save_model(model: ModelArtifact, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_model(model))


def serialize_model(model: ModelArtifact) -> bytes:
    """Canonical bytes: identical artifacts serialize identically, so the
    content-addressed model store can deduplicate and the revert path can
    compare snapshots byte for byte."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "params": model.params.to_dict(),
        "seed": model.seed,
        "classes": list(model.classes),
        "schema_digest": model.schema_digest,
        "train_snapshot_hash": model.train_snapshot_hash,
        "heldout_accuracy": model.heldout_accuracy,
        "heldout_n": model.heldout_n,
        "booster": model.booster.to_dict(),
        "schema": [s.to_dict() for s in model.encoder.schema],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()


def deserialize_model(data: bytes, expected_schema: Sequence[VariableSchema] | None = None) -> ModelArtifact:
    payload = json.loads(data)
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise SchemaDigestMismatch(f"unsupported model format {payload.get('format_version')!r}")
    if expected_schema is not None and schema_digest(expected_schema) != payload["schema_digest"]:
        raise SchemaDigestMismatch("model was trained against a different schema")
    stored_schema = tuple(VariableSchema.from_dict(s) for s in payload["schema"])
    return ModelArtifact(
        kind=payload["kind"],
        params=GBDTParams.from_dict(payload["params"]),
        seed=payload["seed"],
        classes=tuple(payload["classes"]),
        schema_digest=payload["schema_digest"],
        train_snapshot_hash=payload["train_snapshot_hash"],
        heldout_accuracy=payload["heldout_accuracy"],
        heldout_n=payload["heldout_n"],
        booster=Booster.from_dict(payload["booster"]),
        encoder=FeatureEncoder(stored_schema),
    )


def load_model(path, expected_schema: Sequence[VariableSchema] | None = None) -> ModelArtifact:
    with open(path, "rb") as fh:
        return deserialize_model(fh.read(), expected_schema)
