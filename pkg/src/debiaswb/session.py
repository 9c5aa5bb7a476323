"""Stateful debiasing sessions: event log, content-addressed snapshots, history.

A session owns one dataset, one model and at most one pending generated
batch. Every mutation appends exactly one event after its snapshots are
durably written, so a crash can never expose a partial merge: on restart the
state equals the fold of the durable event prefix. Mutations are serialized
through a per-session lock; reads work on immutable snapshots.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from . import curation
from .augment import (
    DEFAULT_GENERATION_CAP,
    DEFAULT_WARNING_RATIO,
    ConstraintSet,
    GeneratedBatch,
    LowCoverageWarning,
    SegmentConstraint,
    generate,
    naive_autotune,
    plan,
)
from .curation import DEFAULT_DRIFT_THRESHOLD, DriftReport, EditLogEntry, drift_report
from .dataset import TabularDataset, ingest, split
from .errors import (
    AcknowledgementRequired,
    LeakageViolation,
    NoPendingBatch,
    SessionExists,
    StaleBatch,
    UnknownHistoryIndex,
    UnknownSession,
)
from .gbdt import GBDTParams
from .metrics import BiasReport, bias_report, default_coverage_threshold
from .model import (
    ModelArtifact,
    Prediction,
    accuracy_interval,
    deserialize_model,
    serialize_model,
    train,
)
from .quality import (
    DEFAULT_CORRELATION_THRESHOLD,
    DEFAULT_SKEW_THRESHOLD,
    QualityReport,
    iqr_fences,
    quality_report,
)
from .schema import VariableSchema


@dataclass(frozen=True)
class SessionConfig:
    heldout_fraction: float = 0.2
    split_seed: int = 7
    model_params: GBDTParams = field(default_factory=GBDTParams)
    model_seed: int = 0
    coverage_threshold: int | None = None  # None -> max(30, train_rows // 100)
    rr_scope: str = "variables"
    generation_cap: int = DEFAULT_GENERATION_CAP
    warning_ratio: float = DEFAULT_WARNING_RATIO
    drift_threshold: float = DEFAULT_DRIFT_THRESHOLD
    correlation_threshold: float = DEFAULT_CORRELATION_THRESHOLD
    skew_threshold: float = DEFAULT_SKEW_THRESHOLD
    insights_top_k: int = 10

    def to_dict(self) -> dict:
        return {
            "heldout_fraction": self.heldout_fraction,
            "split_seed": self.split_seed,
            "model_params": self.model_params.to_dict(),
            "model_seed": self.model_seed,
            "coverage_threshold": self.coverage_threshold,
            "rr_scope": self.rr_scope,
            "generation_cap": self.generation_cap,
            "warning_ratio": self.warning_ratio,
            "drift_threshold": self.drift_threshold,
            "correlation_threshold": self.correlation_threshold,
            "skew_threshold": self.skew_threshold,
            "insights_top_k": self.insights_top_k,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SessionConfig":
        d = dict(d)
        if "model_params" in d:
            d["model_params"] = GBDTParams.from_dict(d["model_params"])
        known = {f for f in cls().to_dict()}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass(frozen=True)
class HistoryEntry:
    index: int
    kind: str                    # baseline | retrain | revert
    timestamp: float
    overall_rr: float
    overall_cr: float
    accuracy: float
    quality_overall: float
    quality_severities: dict
    train_rows: int
    batch_size: int
    edit_count: int
    augmentation: dict | None
    dataset_ref: str
    model_ref: str
    reverted_to: int | None = None

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "kind": self.kind,
            "timestamp": self.timestamp,
            "overall_rr": self.overall_rr,
            "overall_cr": self.overall_cr,
            "accuracy": self.accuracy,
            "quality_overall": self.quality_overall,
            "quality_severities": dict(self.quality_severities),
            "train_rows": self.train_rows,
            "batch_size": self.batch_size,
            "edit_count": self.edit_count,
            "augmentation": self.augmentation,
            "dataset_ref": self.dataset_ref,
            "model_ref": self.model_ref,
            "reverted_to": self.reverted_to,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HistoryEntry":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


# -- stores -------------------------------------------------------------------

class MemorySessionStore:
    """Ephemeral store for tests and throwaway sessions."""

    def __init__(self):
        self.blobs: dict[tuple[str, str], bytes] = {}
        self.event_log: list[dict] = []

    def put_blob(self, kind: str, data: bytes) -> str:
        ref = hashlib.sha256(data).hexdigest()
        self.blobs[(kind, ref)] = data
        return ref

    def get_blob(self, kind: str, ref: str) -> bytes:
        return self.blobs[(kind, ref)]

    def append_event(self, event: dict) -> None:
        self.event_log.append(json.loads(json.dumps(event)))

    def events(self) -> list[dict]:
        return list(self.event_log)

    def has_events(self) -> bool:
        return bool(self.event_log)


class FileSessionStore:
    """Durable store: append-only JSON-lines event file + content-addressed blobs.

    Blobs are written atomically (temp file + rename) and fsynced before any
    event referencing them is appended; a torn final event line is ignored on
    load, so restart always lands on the last durable event.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.events_path = self.root / "events.jsonl"

    def _blob_path(self, kind: str, ref: str) -> Path:
        return self.root / "blobs" / kind / ref

    def put_blob(self, kind: str, data: bytes) -> str:
        ref = hashlib.sha256(data).hexdigest()
        path = self._blob_path(kind, ref)
        if path.exists():
            return ref
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        return ref

    def get_blob(self, kind: str, ref: str) -> bytes:
        with open(self._blob_path(kind, ref), "rb") as fh:
            return fh.read()

    def append_event(self, event: dict) -> None:
        line = json.dumps(event, sort_keys=True, separators=(",", ":"))
        with open(self.events_path, "ab") as fh:
            fh.write(line.encode() + b"\n")
            fh.flush()
            os.fsync(fh.fileno())

    def events(self) -> list[dict]:
        if not self.events_path.exists():
            return []
        out = []
        with open(self.events_path, "rb") as fh:
            data = fh.read()
        for raw in data.split(b"\n"):
            if not raw.strip():
                continue
            try:
                out.append(json.loads(raw))
            except json.JSONDecodeError:
                break  # torn tail line from an interrupted append
        return out

    def has_events(self) -> bool:
        return self.events_path.exists() and bool(self.events())


@dataclass
class PendingBatch:
    pristine: GeneratedBatch
    current: GeneratedBatch
    log: list = field(default_factory=list)

    @property
    def edit_count(self) -> int:
        return sum(1 for e in self.log if e.kind == "edit")


def _batch_to_blob(batch: GeneratedBatch) -> bytes:
    d = batch.to_dict()
    d["predictions"] = [p.to_dict() for p in batch.predictions]
    return json.dumps(d, sort_keys=True, separators=(",", ":")).encode()


def _batch_from_blob(data: bytes) -> GeneratedBatch:
    from .quality import FlaggedPair

    d = json.loads(data)
    rows = TabularDataset.from_dict(d["rows"])
    predictions = tuple(
        Prediction(
            predicted_class=p["predicted_class"],
            class_probabilities=p["class_probabilities"],
            confidence=p["confidence"],
        )
        for p in d["predictions"]
    )
    constraints = ConstraintSet.from_dict(d["constraints"])
    warnings = tuple(_warning_from_dict(w) for w in d["warnings"])
    eq = d.get("estimated_quality")
    quality = None
    if eq is not None:
        quality = QualityReport(
            outlier_severity=eq["severities"]["outliers"],
            duplicate_severity=eq["severities"]["duplicates"],
            correlation_severity=eq["severities"]["correlation"],
            skew_severity=eq["severities"]["skew"],
            imbalance_severity=eq["severities"]["imbalance"],
            overall=eq["overall"],
            flagged_pairs=tuple(
                FlaggedPair(p["variable_a"], p["variable_b"], p["association"], p["measure"])
                for p in eq["flagged_pairs"]
            ),
            flagged_rows=tuple((r["row_id"], r["issue"]) for r in eq["flagged_rows"]),
        )
    return GeneratedBatch(
        batch_id=d["batch_id"],
        generator_id=d["generator_id"],
        rows=rows,
        predictions=predictions,
        parent_ids=tuple((a, b) for a, b in d["parent_ids"]),
        warnings=warnings,
        estimated_accuracy=d["estimated_accuracy"],
        estimated_quality=quality,
        constraints=constraints,
    )


def _warning_from_dict(w: dict) -> LowCoverageWarning:
    return LowCoverageWarning(
        constraint=SegmentConstraint.from_dict(w["constraint"]),
        existing_count=w["existing_count"],
        requested_count=w["requested_count"],
        ratio=w["ratio"],
    )


def _entry_from_log(e: dict) -> EditLogEntry:
    pred = e.get("prediction")
    return EditLogEntry(
        row_id=e["row_id"],
        kind=e["kind"],
        variable=e.get("variable"),
        old_value=e.get("old_value"),
        new_value=e.get("new_value"),
        prediction=Prediction(
            predicted_class=pred["predicted_class"],
            class_probabilities=pred["class_probabilities"],
            confidence=pred["confidence"],
        ) if pred else None,
        timestamp=e.get("timestamp", 0.0),
    )


class Session:
    """Single-writer debiasing session over a snapshot store."""

    def __init__(self, store, session_id: str, config: SessionConfig,
                 clock: Callable[[], float] = time.time):
        self.store = store
        self.session_id = session_id
        self.config = config
        self.clock = clock
        self._lock = threading.RLock()
        self.dataset: TabularDataset | None = None
        self.model: ModelArtifact | None = None
        self.pending: PendingBatch | None = None
        self.history: list[HistoryEntry] = []
        self.coverage_threshold: int = 0
        self.quality_fences: dict = {}
        self._requests: dict[str, dict] = {}
        self._report_cache: dict[str, object] = {}

    # -- bootstrap -------------------------------------------------------

    @classmethod
    def create(
        cls,
        store,
        csv_bytes: bytes,
        schema: Sequence[VariableSchema],
        config: SessionConfig | None = None,
        session_id: str = "default",
        clock: Callable[[], float] = time.time,
    ) -> "Session":
        if store.has_events():
            raise SessionExists(f"store already holds a session")
        config = config or SessionConfig()
        self = cls(store, session_id, config, clock)

        dataset = split(ingest(csv_bytes, schema), config.heldout_fraction, config.split_seed)
        model = train(dataset, config.model_params, config.model_seed)
        self.coverage_threshold = (
            config.coverage_threshold
            if config.coverage_threshold is not None
            else default_coverage_threshold(len(dataset.train_indices))
        )
        self.quality_fences = iqr_fences(dataset, list(dataset.train_indices))
        self.dataset = dataset
        self.model = model

        entry = self._make_entry(kind="baseline", batch_size=0, edit_count=0, augmentation=None)
        self.history.append(entry)
        self.store.append_event({
            "type": "init",
            "session_id": session_id,
            "config": config.to_dict(),
            "coverage_threshold": self.coverage_threshold,
            "quality_fences": {k: list(v) for k, v in self.quality_fences.items()},
            "dataset_ref": entry.dataset_ref,
            "model_ref": entry.model_ref,
            "history_entry": entry.to_dict(),
        })
        return self

    @classmethod
    def load(cls, store, clock: Callable[[], float] = time.time) -> "Session":
        events = store.events()
        if not events:
            raise UnknownSession("store holds no session")
        init = events[0]
        if init.get("type") != "init":
            raise UnknownSession("event log does not start with an init event")
        config = SessionConfig.from_dict(init["config"])
        self = cls(store, init["session_id"], config, clock)
        self.coverage_threshold = init["coverage_threshold"]
        self.quality_fences = {k: tuple(v) for k, v in init["quality_fences"].items()}
        self._restore_refs(init["dataset_ref"], init["model_ref"])
        self.history.append(HistoryEntry.from_dict(init["history_entry"]))

        for ev in events[1:]:
            kind = ev["type"]
            rid = ev.get("request_id")
            if kind == "generate":
                batch = _batch_from_blob(store.get_blob("batches", ev["batch_ref"]))
                self.pending = PendingBatch(pristine=batch, current=batch)
                if rid:
                    self._requests[rid] = {"type": kind, "batch_ref": ev["batch_ref"]}
            elif kind == "edit":
                entry = _entry_from_log(ev["entry"])
                self.pending.log.append(entry)
                self.pending.current = curation.apply_edit(
                    self.pending.current, entry, self.model, self.dataset
                )
                if rid:
                    self._requests[rid] = {"type": kind, "row_id": entry.row_id}
            elif kind == "discard":
                self.pending = None
                if rid:
                    self._requests[rid] = {"type": kind}
            elif kind in ("merge", "revert"):
                entry = HistoryEntry.from_dict(ev["history_entry"])
                self._restore_refs(entry.dataset_ref, entry.model_ref)
                self.history.append(entry)
                self.pending = None
                if rid:
                    self._requests[rid] = {"type": kind, "history_index": entry.index}
        return self

    def _restore_refs(self, dataset_ref: str, model_ref: str) -> None:
        self.dataset = TabularDataset.from_dict(
            json.loads(self.store.get_blob("datasets", dataset_ref))
        )
        self.model = deserialize_model(self.store.get_blob("models", model_ref), self.dataset.schema)
        self._report_cache.clear()

    # -- snapshots / entries ----------------------------------------------

    def _persist_state(self) -> tuple[str, str]:
        dref = self.store.put_blob("datasets", self.dataset.canonical_bytes())
        mref = self.store.put_blob("models", serialize_model(self.model))
        return dref, mref

    def _make_entry(self, kind: str, batch_size: int, edit_count: int,
                    augmentation: dict | None, reverted_to: int | None = None) -> HistoryEntry:
        dref, mref = self._persist_state()
        report = self.bias()
        quality = self.quality()
        return HistoryEntry(
            index=len(self.history),
            kind=kind,
            timestamp=self.clock(),
            overall_rr=report.overall_rr,
            overall_cr=report.overall_cr,
            accuracy=self.model.heldout_accuracy,
            quality_overall=quality.overall,
            quality_severities=quality.severities(),
            train_rows=len(self.dataset.train_indices),
            batch_size=batch_size,
            edit_count=edit_count,
            augmentation=augmentation,
            dataset_ref=dref,
            model_ref=mref,
            reverted_to=reverted_to,
        )

    # -- reads -------------------------------------------------------------

    def bias(self) -> BiasReport:
        # reports are pure functions of the immutable dataset/model pair, so
        # they are memoized until a mutation swaps that pair out
        cached = self._report_cache.get("bias")
        if cached is None:
            cached = bias_report(
                self.dataset,
                self.model,
                threshold=self.coverage_threshold,
                rr_scope=self.config.rr_scope,
                top_k=self.config.insights_top_k,
            )
            self._report_cache["bias"] = cached
        return cached

    def quality(self) -> QualityReport:
        cached = self._report_cache.get("quality")
        if cached is None:
            cached = quality_report(
                self.dataset.train_view(),
                fences=self.quality_fences,
                correlation_threshold=self.config.correlation_threshold,
                skew_threshold=self.config.skew_threshold,
            )
            self._report_cache["quality"] = cached
        return cached

    def overview(self) -> dict:
        last = self.history[-1]
        prev = self.history[-2] if len(self.history) > 1 else None
        lo, hi = accuracy_interval(self.model)
        return {
            "accuracy": self.model.heldout_accuracy,
            "accuracy_delta": (last.accuracy - prev.accuracy) if prev else 0.0,
            "accuracy_interval": [lo, hi],
            "train_rows": len(self.dataset.train_indices),
            "heldout_rows": len(self.dataset.heldout_indices),
            "predictors": [s.name for s in self.dataset.predictors],
            "target": self.dataset.target.name,
            "classes": list(self.dataset.target.categories),
            "retrain_count": sum(1 for h in self.history if h.kind == "retrain"),
            "pending_batch": self.pending.current.batch_id if self.pending else None,
            "history_length": len(self.history),
        }

    def plan(self, constraints: ConstraintSet) -> list:
        return plan(constraints, self.dataset, self.config.warning_ratio, self.config.generation_cap)

    def drift(self) -> DriftReport:
        merged = self.dataset.train_view()
        if self.pending and len(self.pending.current.rows):
            batch = self.pending.current.rows
            merged = merged.with_rows_appended(
                batch.rows, batch.row_ids, batch.provenance, ("train",) * len(batch)
            )
        return drift_report(self.dataset.train_view(), merged, self.config.drift_threshold)

    def what_if(self, row_id: str, variable: str, value) -> Prediction:
        batch = self._require_pending().current
        prediction, _ = curation.what_if(batch, row_id, variable, value, self.model, self.clock)
        return prediction

    def history_entries(self) -> list[dict]:
        out = []
        prev = None
        for h in self.history:
            d = h.to_dict()
            d["deltas"] = {
                "rr": h.overall_rr - prev.overall_rr if prev else 0.0,
                "cr": h.overall_cr - prev.overall_cr if prev else 0.0,
                "accuracy": h.accuracy - prev.accuracy if prev else 0.0,
                "quality": h.quality_overall - prev.quality_overall if prev else 0.0,
            }
            out.append(d)
            prev = h
        return out

    def _require_pending(self) -> PendingBatch:
        if self.pending is None:
            raise NoPendingBatch("no generated batch is pending")
        return self.pending

    # -- mutations -----------------------------------------------------------

    def generate(self, constraints: ConstraintSet, backend: str = "nn", seed: int = 0,
                 request_id: str | None = None) -> GeneratedBatch:
        with self._lock:
            seen = self._seen(request_id, "generate")
            if seen is not None:
                return _batch_from_blob(self.store.get_blob("batches", seen["batch_ref"]))
            batch = generate(
                constraints,
                self.dataset,
                self.model,
                backend=backend,
                seed=seed,
                cap=self.config.generation_cap,
                warning_threshold=self.config.warning_ratio,
                quality_fences=self.quality_fences,
            )
            ref = self.store.put_blob("batches", _batch_to_blob(batch))
            self.store.append_event({
                "type": "generate",
                "request_id": request_id,
                "constraints": constraints.to_dict(),
                "backend": backend,
                "seed": seed,
                "batch_ref": ref,
            })
            self.pending = PendingBatch(pristine=batch, current=batch)
            if request_id:
                self._requests[request_id] = {"type": "generate", "batch_ref": ref}
            return batch

    def edit_cell(self, row_id: str, variable: str, value, request_id: str | None = None) -> Prediction:
        with self._lock:
            seen = self._seen(request_id, "edit")
            if seen is not None:
                batch = self._require_pending().current
                return batch.prediction_of(seen["row_id"])
            pending = self._require_pending()
            prediction, entry = curation.what_if(
                pending.current, row_id, variable, value, self.model, self.clock
            )
            self.store.append_event({
                "type": "edit",
                "request_id": request_id,
                "entry": entry.to_dict(),
            })
            pending.log.append(entry)
            pending.current = curation.apply_edit(pending.current, entry, self.model, self.dataset)
            if request_id:
                self._requests[request_id] = {"type": "edit", "row_id": row_id}
            return prediction

    def delete_row(self, row_id: str, request_id: str | None = None) -> None:
        with self._lock:
            if self._seen(request_id, "edit") is not None:
                return
            pending = self._require_pending()
            pending.current.rows.index_of(row_id)  # raises UnknownRow early
            entry = curation.delete_entry(row_id, self.clock)
            self.store.append_event({
                "type": "edit",
                "request_id": request_id,
                "entry": entry.to_dict(),
            })
            pending.log.append(entry)
            pending.current = curation.apply_edit(pending.current, entry, self.model, self.dataset)
            if request_id:
                self._requests[request_id] = {"type": "edit", "row_id": row_id}

    def discard_batch(self, request_id: str | None = None) -> None:
        with self._lock:
            if self._seen(request_id, "discard") is not None:
                return
            self._require_pending()
            self.store.append_event({"type": "discard", "request_id": request_id})
            self.pending = None
            if request_id:
                self._requests[request_id] = {"type": "discard"}

    def merge_and_retrain(self, acknowledged: bool, request_id: str | None = None,
                          expected_batch_id: str | None = None) -> HistoryEntry:
        with self._lock:
            seen = self._seen(request_id, "merge")
            if seen is not None:
                return self.history[seen["history_index"]]
            if not acknowledged:
                raise AcknowledgementRequired(
                    "retraining requires the interaction-bias warning to be acknowledged"
                )
            batch = self.pending.current if self.pending else None
            if expected_batch_id is not None:
                if batch is None or batch.batch_id != expected_batch_id:
                    raise StaleBatch(f"batch {expected_batch_id!r} is not the pending batch")

            heldout_before = self.dataset.heldout_ids
            if batch is not None and len(batch.rows):
                rows = batch.rows
                self.dataset = self.dataset.with_rows_appended(
                    rows.rows, rows.row_ids, rows.provenance, ("train",) * len(rows)
                )
            if self.dataset.heldout_ids != heldout_before:
                raise LeakageViolation("merge must not touch the heldout id set")
            self.model = train(self.dataset, self.config.model_params, self.config.model_seed)
            self._report_cache.clear()

            entry = self._make_entry(
                kind="retrain",
                batch_size=len(batch.rows) if batch else 0,
                edit_count=self.pending.edit_count if self.pending else 0,
                augmentation=batch.constraints.to_dict() if batch else None,
            )
            self.store.append_event({
                "type": "merge",
                "request_id": request_id,
                "batch_id": batch.batch_id if batch else None,
                "history_entry": entry.to_dict(),
            })
            self.history.append(entry)
            self.pending = None
            if request_id:
                self._requests[request_id] = {"type": "merge", "history_index": entry.index}
            return entry

    def revert(self, index: int, request_id: str | None = None) -> HistoryEntry:
        with self._lock:
            seen = self._seen(request_id, "revert")
            if seen is not None:
                return self.history[seen["history_index"]]
            if not 0 <= index < len(self.history):
                raise UnknownHistoryIndex(f"no history entry {index}")
            target = self.history[index]
            self._restore_refs(target.dataset_ref, target.model_ref)
            entry = self._make_entry(
                kind="revert",
                batch_size=0,
                edit_count=0,
                augmentation=None,
                reverted_to=index,
            )
            self.store.append_event({
                "type": "revert",
                "request_id": request_id,
                "index": index,
                "history_entry": entry.to_dict(),
            })
            self.history.append(entry)
            self.pending = None
            if request_id:
                self._requests[request_id] = {"type": "revert", "history_index": entry.index}
            return entry

    def autotune(self, budget: int = 4, grid: Sequence[int] | None = None) -> ConstraintSet:
        return naive_autotune(
            self.dataset,
            self.model,
            budget=budget,
            grid=grid,
            threshold=self.coverage_threshold,
            rr_scope=self.config.rr_scope,
            cap=self.config.generation_cap,
        )

    def _seen(self, request_id: str | None, expected_type: str) -> dict | None:
        if request_id is None:
            return None
        hit = self._requests.get(request_id)
        if hit is None:
            return None
        if hit["type"] != expected_type:
            raise StaleBatch(
                f"request id {request_id!r} was already used for a {hit['type']} request"
            )
        return hit


class SessionManager:
    """Directory of file-backed sessions, one subdirectory per session id."""

    def __init__(self, data_dir: str | Path, clock: Callable[[], float] = time.time):
        self.data_dir = Path(data_dir)
        self.clock = clock
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _store(self, session_id: str) -> FileSessionStore:
        return FileSessionStore(self.data_dir / session_id)

    def create(self, csv_bytes: bytes, schema: Sequence[VariableSchema],
               config: SessionConfig | None = None, session_id: str = "default") -> Session:
        with self._lock:
            store = self._store(session_id)
            session = Session.create(store, csv_bytes, schema, config, session_id, self.clock)
            self._sessions[session_id] = session
            return session

    def get(self, session_id: str = "default") -> Session:
        with self._lock:
            if session_id in self._sessions:
                return self._sessions[session_id]
            store = self._store(session_id)
            if not store.has_events():
                raise UnknownSession(f"no session {session_id!r} under {self.data_dir}")
            session = Session.load(store, self.clock)
            self._sessions[session_id] = session
            return session

    def exists(self, session_id: str = "default") -> bool:
        return self._store(session_id).has_events()

    def list_ids(self) -> list[str]:
        if not self.data_dir.exists():
            return []
        return sorted(p.name for p in self.data_dir.iterdir() if (p / "events.jsonl").exists())
