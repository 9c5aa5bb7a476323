"""Typed tabular datasets with per-row provenance and a guarded train/heldout split.

Datasets are immutable values: every operation returns a new instance, so
snapshots, digests and concurrent reads need no locking.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    AlreadySplit,
    CellParseError,
    EmptyDataset,
    LeakageViolation,
    OutOfDomain,
    SchemaMismatch,
    TooFewRows,
    UnknownRow,
)
from .schema import VariableSchema, with_default_bins

PROVENANCES = ("original", "generated", "edited")
SPLIT_TAGS = ("train", "heldout", "unsplit")

Cell = object  # float for continuous cells, str for categorical/binary
Row = tuple


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class TabularDataset:
    schema: tuple[VariableSchema, ...]
    rows: tuple[Row, ...]
    row_ids: tuple[str, ...]
    provenance: tuple[str, ...]
    split_tag: tuple[str, ...]

    def __post_init__(self):
        n = len(self.rows)
        if not (len(self.row_ids) == len(self.provenance) == len(self.split_tag) == n):
            raise SchemaMismatch("row metadata arrays must match the row count")
        targets = [s for s in self.schema if s.role == "target"]
        if len(targets) != 1:
            raise SchemaMismatch(f"expected exactly one target variable, found {len(targets)}")
        if len(set(self.row_ids)) != n:
            raise SchemaMismatch("row ids must be unique")
        width = len(self.schema)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise SchemaMismatch(f"row {self.row_ids[i]!r} has {len(row)} cells, schema has {width}")
            for s, cell in zip(self.schema, row):
                if not s.contains(cell):
                    raise OutOfDomain(
                        f"row {self.row_ids[i]!r}: value {cell!r} outside the domain of {s.name!r}"
                    )
        for i in range(n):
            if self.provenance[i] not in PROVENANCES:
                raise SchemaMismatch(f"unknown provenance {self.provenance[i]!r}")
            if self.split_tag[i] not in SPLIT_TAGS:
                raise SchemaMismatch(f"unknown split tag {self.split_tag[i]!r}")
            if self.split_tag[i] == "heldout" and self.provenance[i] != "original":
                raise LeakageViolation("heldout rows must keep original provenance")

    # -- lookups ----------------------------------------------------------

    @cached_property
    def _col_index(self) -> dict[str, int]:
        return {s.name: i for i, s in enumerate(self.schema)}

    @cached_property
    def _row_index(self) -> dict[str, int]:
        return {rid: i for i, rid in enumerate(self.row_ids)}

    @cached_property
    def target(self) -> VariableSchema:
        return next(s for s in self.schema if s.role == "target")

    @cached_property
    def target_index(self) -> int:
        return self._col_index[self.target.name]

    @cached_property
    def predictors(self) -> tuple[VariableSchema, ...]:
        return tuple(s for s in self.schema if s.role == "predictor")

    @cached_property
    def train_indices(self) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.split_tag) if t == "train")

    @cached_property
    def heldout_indices(self) -> tuple[int, ...]:
        return tuple(i for i, t in enumerate(self.split_tag) if t == "heldout")

    @cached_property
    def train_ids(self) -> frozenset[str]:
        return frozenset(self.row_ids[i] for i in self.train_indices)

    @cached_property
    def heldout_ids(self) -> frozenset[str]:
        return frozenset(self.row_ids[i] for i in self.heldout_indices)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def is_split(self) -> bool:
        return any(t != "unsplit" for t in self.split_tag)

    def variable(self, name: str) -> VariableSchema:
        try:
            return self.schema[self._col_index[name]]
        except KeyError:
            raise SchemaMismatch(f"unknown variable {name!r}") from None

    def column(self, name: str, indices: Sequence[int] | None = None) -> list:
        j = self._col_index.get(name)
        if j is None:
            raise SchemaMismatch(f"unknown variable {name!r}")
        if indices is None:
            return [row[j] for row in self.rows]
        return [self.rows[i][j] for i in indices]

    def row_by_id(self, row_id: str) -> Row:
        try:
            return self.rows[self._row_index[row_id]]
        except KeyError:
            raise UnknownRow(f"no row with id {row_id!r}") from None

    def index_of(self, row_id: str) -> int:
        try:
            return self._row_index[row_id]
        except KeyError:
            raise UnknownRow(f"no row with id {row_id!r}") from None

    # -- derivations -------------------------------------------------------

    def subset(self, indices: Sequence[int]) -> "TabularDataset":
        return TabularDataset(
            schema=self.schema,
            rows=tuple(self.rows[i] for i in indices),
            row_ids=tuple(self.row_ids[i] for i in indices),
            provenance=tuple(self.provenance[i] for i in indices),
            split_tag=tuple(self.split_tag[i] for i in indices),
        )

    def train_view(self) -> "TabularDataset":
        return self.subset(self.train_indices)

    def heldout_view(self) -> "TabularDataset":
        return self.subset(self.heldout_indices)

    def with_rows_appended(
        self,
        rows: Iterable[Row],
        row_ids: Iterable[str],
        provenance: Iterable[str],
        split_tag: Iterable[str],
    ) -> "TabularDataset":
        return TabularDataset(
            schema=self.schema,
            rows=self.rows + tuple(tuple(r) for r in rows),
            row_ids=self.row_ids + tuple(row_ids),
            provenance=self.provenance + tuple(provenance),
            split_tag=self.split_tag + tuple(split_tag),
        )

    def with_cell(self, row_id: str, variable: str, value, provenance: str | None = None) -> "TabularDataset":
        i = self.index_of(row_id)
        j = self._col_index.get(variable)
        if j is None:
            raise SchemaMismatch(f"unknown variable {variable!r}")
        if not self.schema[j].contains(value):
            raise OutOfDomain(f"value {value!r} outside the domain of {variable!r}")
        row = list(self.rows[i])
        row[j] = value
        rows = list(self.rows)
        rows[i] = tuple(row)
        prov = list(self.provenance)
        if provenance is not None:
            prov[i] = provenance
        return replace(self, rows=tuple(rows), provenance=tuple(prov))

    def without_rows(self, row_ids: Iterable[str]) -> "TabularDataset":
        drop = set(row_ids)
        missing = drop - set(self.row_ids)
        if missing:
            raise UnknownRow(f"no row with id {sorted(missing)[0]!r}")
        keep = [i for i, rid in enumerate(self.row_ids) if rid not in drop]
        return self.subset(keep)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema": [s.to_dict() for s in self.schema],
            "row_ids": list(self.row_ids),
            "rows": [[c for c in row] for row in self.rows],
            "provenance": list(self.provenance),
            "split_tag": list(self.split_tag),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TabularDataset":
        schema = tuple(VariableSchema.from_dict(s) for s in d["schema"])
        rows = []
        for raw in d["rows"]:
            rows.append(tuple(
                float(c) if s.kind == "continuous" else c for s, c in zip(schema, raw)
            ))
        return cls(
            schema=schema,
            rows=tuple(rows),
            row_ids=tuple(d["row_ids"]),
            provenance=tuple(d["provenance"]),
            split_tag=tuple(d["split_tag"]),
        )

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")).encode()

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()

    def train_digest(self) -> str:
        """Digest of the exact train rows (id + cells), order-insensitive."""
        items = sorted(
            (self.row_ids[i], [_format_cell(c) for c in self.rows[i]]) for i in self.train_indices
        )
        blob = json.dumps(items, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()

    def to_csv_bytes(self) -> bytes:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([s.name for s in self.schema])
        for row in self.rows:
            writer.writerow([_format_cell(c) for c in row])
        return buf.getvalue().encode("utf-8")


def _parse_cell(text: str, schema: VariableSchema, row_no: int):
    if schema.kind == "continuous":
        try:
            value = float(text)
        except ValueError:
            raise CellParseError(row_no, schema.name, text, "not a number") from None
        if not math.isfinite(value):
            raise CellParseError(row_no, schema.name, text, "cells must be finite numbers")
        if not schema.contains(value):
            raise CellParseError(row_no, schema.name, text, "outside declared bin range")
        return value
    if text not in schema.categories:
        raise CellParseError(row_no, schema.name, text, "not in category list")
    return text


def ingest(csv_bytes: bytes, schema: Sequence[VariableSchema]) -> TabularDataset:
    """Parse a UTF-8 CSV (header row required) against the declared schema.

    All rows come back with provenance ``original`` and split tag ``unsplit``.
    Missing cells are rejected: the workbench assumes complete data.
    """
    schema = tuple(schema)
    text = csv_bytes.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyDataset("file has no header row") from None
    names = {s.name for s in schema}
    header_set = set(header)
    unknown = header_set - names
    missing = names - header_set
    if unknown:
        raise SchemaMismatch(f"unknown column {sorted(unknown)[0]!r} in header")
    if missing:
        raise SchemaMismatch(f"missing column {sorted(missing)[0]!r} in header")
    if len(header) != len(header_set):
        raise SchemaMismatch("duplicate column in header")
    order = [header.index(s.name) for s in schema]

    rows: list[Row] = []
    for row_no, record in enumerate(reader, start=1):
        if not record:
            continue
        if len(record) != len(header):
            raise CellParseError(row_no, header[min(len(record), len(header)) - 1],
                                 ",".join(record), "wrong cell count")
        rows.append(tuple(_parse_cell(record[j], s, row_no) for j, s in zip(order, schema)))
    if not rows:
        raise EmptyDataset("file has a header but no data rows")

    n = len(rows)
    return TabularDataset(
        schema=schema,
        rows=tuple(rows),
        row_ids=tuple(f"o{i:05d}" for i in range(n)),
        provenance=("original",) * n,
        split_tag=("unsplit",) * n,
    )


def split(dataset: TabularDataset, heldout_fraction: float, seed: int) -> TabularDataset:
    """Stratified train/heldout split, deterministic for a fixed seed.

    Also freezes default quartile bins for continuous variables that declared
    none, computed on the train rows so segment denominators stay comparable
    across later retrains.
    """
    import random

    if dataset.is_split:
        raise AlreadySplit("dataset rows already carry split tags")
    if not 0 < heldout_fraction < 1:
        raise TooFewRows(f"heldout fraction must be in (0,1), got {heldout_fraction}")

    target_col = dataset.column(dataset.target.name)
    by_class: dict[str, list[int]] = {}
    for i, label in enumerate(target_col):
        by_class.setdefault(label, []).append(i)
    # every declared class needs two rows, or stratification is impossible
    for label in dataset.target.categories:
        if len(by_class.get(label, ())) < 2:
            raise TooFewRows(
                f"target class {label!r} has {len(by_class.get(label, ()))} row(s); "
                "stratification needs >= 2"
            )

    total_heldout = int(len(dataset) * heldout_fraction + 0.5)
    total_heldout = min(max(total_heldout, len(by_class)), len(dataset) - len(by_class))

    # largest-remainder allocation of the heldout quota across classes
    quotas = {c: len(idxs) * heldout_fraction for c, idxs in by_class.items()}
    take = {c: min(max(int(q), 1), len(by_class[c]) - 1) for c, q in quotas.items()}
    remainders = sorted(
        by_class, key=lambda c: (-(quotas[c] - int(quotas[c])), c)
    )
    i = 0
    while sum(take.values()) < total_heldout and i < 10 * len(by_class):
        c = remainders[i % len(remainders)]
        if take[c] < len(by_class[c]) - 1:
            take[c] += 1
        i += 1
    while sum(take.values()) > total_heldout:
        c = max(take, key=lambda c: (take[c] - quotas[c], c))
        if take[c] <= 1:
            break
        take[c] -= 1

    rng = random.Random(seed)
    tags = ["train"] * len(dataset)
    for label in sorted(by_class):
        idxs = list(by_class[label])
        rng.shuffle(idxs)
        for i in idxs[: take[label]]:
            tags[i] = "heldout"

    heldout_n = sum(1 for t in tags if t == "heldout")
    # 2-point proportion guarantee, plus the unavoidable one-row granularity
    # of small heldout parts (vanishes at realistic sizes)
    tolerance = 0.02 + 1.0 / heldout_n
    for label, idxs in by_class.items():
        whole = len(idxs) / len(dataset)
        part = sum(1 for i in idxs if tags[i] == "heldout") / heldout_n
        if abs(part - whole) > tolerance + 1e-12:
            raise TooFewRows(
                f"cannot stratify: class {label!r} share drifts {abs(part - whole):.3f} in the heldout part"
            )

    out = replace(dataset, split_tag=tuple(tags))

    # freeze quartile bins for continuous variables without declared edges
    new_schema = []
    changed = False
    for s in out.schema:
        if s.kind == "continuous" and s.bin_edges is None:
            train_vals = out.column(s.name, out.train_indices)
            new_schema.append(with_default_bins(s, train_vals))
            changed = True
        else:
            new_schema.append(s)
    if changed:
        out = replace(out, schema=tuple(new_schema))
    return out


def segment_counts(dataset: TabularDataset, variable: str, indices: Sequence[int] | None = None) -> dict:
    """Count rows per segment of one variable. Keys are segment labels."""
    var = dataset.variable(variable)
    segments = var.segments()
    counts = {seg.label: 0 for seg in segments}
    values = dataset.column(variable, indices)
    for v in values:
        counts[var.segment_of(v).label] += 1
    return counts
