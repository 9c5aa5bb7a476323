"""Constrained synthetic-row generation with low-coverage warnings.

The default backend interpolates between a matching train row and one of its
k nearest matching neighbours (standardized Euclidean over the continuous
predictors): continuous cells are drawn uniformly between the pair,
categorical cells are resampled from the pair's values, and the target label
comes from the nearer parent. Parent row ids are logged per generated row so
the interpolation property stays machine-checkable.

Alternative generators plug in through the ``GeneratorBackend`` protocol and
the backend registry; ``module:attr`` names import an external backend.
"""
from __future__ import annotations

import hashlib
import importlib
import json
import math
import os
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .dataset import TabularDataset
from .errors import (
    CapExceeded,
    ConstraintOutOfDomain,
    InfeasibleJointRegion,
    NoMatchingRows,
    SchemaMismatch,
    TooFewRows,
    UnknownBackend,
)
from .metrics import aggregate_from_counts, default_coverage_threshold, segment_count_table
from .model import ModelArtifact, Prediction, predict_rows
from .quality import QualityReport, iqr_fences, quality_report

DEFAULT_GENERATION_CAP = 10000
DEFAULT_WARNING_RATIO = 1.0
NEIGHBOR_COUNT = 5


@dataclass(frozen=True)
class SegmentConstraint:
    """One variable region plus the number of rows requested from it.

    Continuous regions are closed intervals [lo, hi]; ``hi_open`` switches to
    [lo, hi) so a constraint can mirror a segment bin exactly.
    """

    variable: str
    requested_count: int
    lo: float | None = None
    hi: float | None = None
    hi_open: bool = False
    categories: tuple[str, ...] | None = None

    def matches(self, value) -> bool:
        if self.categories is not None:
            return value in self.categories
        if value < self.lo:
            return False
        return value < self.hi if self.hi_open else value <= self.hi

    def validate(self, dataset: TabularDataset) -> None:
        if self.requested_count < 1:
            raise ConstraintOutOfDomain(f"{self.variable}: requested count must be >= 1")
        try:
            var = dataset.variable(self.variable)
        except SchemaMismatch:
            raise ConstraintOutOfDomain(f"unknown variable {self.variable!r}") from None
        if var.role != "predictor":
            raise ConstraintOutOfDomain(f"{self.variable}: constraints apply to predictor variables")
        if var.kind == "continuous":
            if self.categories is not None or self.lo is None or self.hi is None:
                raise ConstraintOutOfDomain(f"{self.variable}: continuous constraints take min/max bounds")
            if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
                raise ConstraintOutOfDomain(f"{self.variable}: empty numeric range")
            if var.bin_edges is not None:
                if self.lo < var.bin_edges[0] or self.hi > var.bin_edges[-1]:
                    raise ConstraintOutOfDomain(
                        f"{self.variable}: range [{self.lo}, {self.hi}] outside the variable domain"
                    )
        else:
            if self.categories is None or self.lo is not None:
                raise ConstraintOutOfDomain(f"{self.variable}: categorical constraints take a category subset")
            bad = set(self.categories) - set(var.categories)
            if bad or not self.categories:
                raise ConstraintOutOfDomain(f"{self.variable}: categories {sorted(bad)} outside the domain")

    def to_dict(self) -> dict:
        d: dict = {"variable": self.variable, "count": self.requested_count}
        if self.categories is not None:
            d["categories"] = list(self.categories)
        else:
            d["min"] = self.lo if self.lo != -math.inf else "-inf"
            d["max"] = self.hi if self.hi != math.inf else "inf"
            if self.hi_open:
                d["max_open"] = True
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SegmentConstraint":
        def num(v):
            if isinstance(v, str):
                return math.inf if v.strip() in ("inf", "+inf") else (-math.inf if v.strip() == "-inf" else float(v))
            return float(v)

        if "categories" in d:
            return cls(
                variable=d["variable"],
                requested_count=int(d["count"]),
                categories=tuple(d["categories"]),
            )
        return cls(
            variable=d["variable"],
            requested_count=int(d["count"]),
            lo=num(d["min"]),
            hi=num(d["max"]),
            hi_open=bool(d.get("max_open", False)),
        )


@dataclass(frozen=True)
class ConstraintSet:
    """Multivariate generation request.

    ``joint=True`` (the default) makes every generated row satisfy all region
    predicates simultaneously; independent mode generates each constraint's
    quota from its own region only. The batch size is the sum of the
    per-constraint counts in both modes.
    """

    constraints: tuple[SegmentConstraint, ...]
    joint: bool = True

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def total_requested(self) -> int:
        return sum(c.requested_count for c in self.constraints)

    def validate(self, dataset: TabularDataset, cap: int = DEFAULT_GENERATION_CAP) -> None:
        for c in self.constraints:
            c.validate(dataset)
        if self.joint:
            seen: set[str] = set()
            for c in self.constraints:
                if c.variable in seen:
                    raise ConstraintOutOfDomain(
                        f"joint mode allows at most one constraint per variable ({c.variable!r} repeats)"
                    )
                seen.add(c.variable)
        if self.total_requested > cap:
            raise CapExceeded(
                f"{self.total_requested} rows requested, generation cap is {cap}",
            )

    def to_dict(self) -> dict:
        return {"joint": self.joint, "constraints": [c.to_dict() for c in self.constraints]}

    @classmethod
    def from_dict(cls, d: dict) -> "ConstraintSet":
        return cls(
            constraints=tuple(SegmentConstraint.from_dict(c) for c in d.get("constraints", [])),
            joint=bool(d.get("joint", True)),
        )


@dataclass(frozen=True)
class LowCoverageWarning:
    constraint: SegmentConstraint
    existing_count: int
    requested_count: int
    ratio: float

    def to_dict(self) -> dict:
        return {
            "constraint": self.constraint.to_dict(),
            "existing_count": self.existing_count,
            "requested_count": self.requested_count,
            "ratio": self.ratio,
        }


@dataclass(frozen=True)
class GeneratedBatch:
    batch_id: str
    generator_id: str
    rows: TabularDataset
    predictions: tuple
    parent_ids: tuple            # (parent_a, parent_b) per row
    warnings: tuple
    estimated_accuracy: float | None
    estimated_quality: QualityReport | None
    constraints: ConstraintSet

    @property
    def size(self) -> int:
        return len(self.rows)

    def prediction_of(self, row_id: str) -> Prediction:
        return self.predictions[self.rows.index_of(row_id)]

    def to_dict(self) -> dict:
        return {
            "batch_id": self.batch_id,
            "generator_id": self.generator_id,
            "size": self.size,
            "estimated_accuracy": self.estimated_accuracy,
            "estimated_quality": self.estimated_quality.to_dict() if self.estimated_quality else None,
            "warnings": [w.to_dict() for w in self.warnings],
            "constraints": self.constraints.to_dict(),
            "rows": self.rows.to_dict(),
            "parent_ids": [list(p) for p in self.parent_ids],
        }


def _matching_train_indices(dataset: TabularDataset, constraints: Sequence[SegmentConstraint]) -> list[int]:
    cols = {c.variable: dataset._col_index[c.variable] for c in constraints}
    out = []
    for i in dataset.train_indices:
        row = dataset.rows[i]
        if all(c.matches(row[cols[c.variable]]) for c in constraints):
            out.append(i)
    return out


def matching_train_count(dataset: TabularDataset, *constraints: SegmentConstraint) -> int:
    """Number of train rows satisfying every given region predicate."""
    return len(_matching_train_indices(dataset, constraints))


def plan(
    constraints: ConstraintSet,
    dataset: TabularDataset,
    threshold: float = DEFAULT_WARNING_RATIO,
    cap: int = DEFAULT_GENERATION_CAP,
) -> list[LowCoverageWarning]:
    """Warn for every constraint whose existing/requested ratio is below the
    threshold. Warnings inform, they never block generation."""
    constraints.validate(dataset, cap)
    warnings = []
    for c in constraints.constraints:
        existing = len(_matching_train_indices(dataset, [c]))
        ratio = existing / c.requested_count
        if ratio < threshold:
            warnings.append(LowCoverageWarning(
                constraint=c,
                existing_count=existing,
                requested_count=c.requested_count,
                ratio=ratio,
            ))
    return warnings


class GeneratorBackend(Protocol):
    name: str

    def generate_rows(
        self,
        dataset: TabularDataset,
        pool: Sequence[int],
        count: int,
        rng: np.random.Generator,
    ) -> tuple[list[tuple], list[tuple[str, str]]]:
        """Return (rows, parent id pairs); rows are full schema-width tuples."""
        ...


class NearestNeighborInterpolator:
    """Default backend: segment-conditioned nearest-neighbour interpolation."""

    name = "nn"

    def __init__(self, k: int = NEIGHBOR_COUNT):
        self.k = k

    def generate_rows(self, dataset, pool, count, rng):
        cont_idx = [dataset._col_index[s.name] for s in dataset.predictors if s.kind == "continuous"]
        cat_idx = [dataset._col_index[s.name] for s in dataset.predictors if s.kind != "continuous"]
        target_j = dataset.target_index
        pool = list(pool)
        mat = np.asarray(
            [[float(dataset.rows[i][j]) for j in cont_idx] for i in pool], dtype=np.float64
        ) if cont_idx else np.zeros((len(pool), 0))
        mu = mat.mean(axis=0) if len(cont_idx) else np.zeros(0)
        sd = mat.std(axis=0) if len(cont_idx) else np.zeros(0)
        sd = np.where(sd == 0.0, 1.0, sd)
        std = (mat - mu) / sd

        rows: list[tuple] = []
        parents: list[tuple[str, str]] = []
        k = min(self.k, len(pool) - 1)
        for _ in range(count):
            a = int(rng.integers(len(pool)))
            d = np.linalg.norm(std - std[a], axis=1)
            d[a] = np.inf
            order = np.lexsort((np.arange(len(pool)), d))
            b = int(order[int(rng.integers(k))])
            row_a = dataset.rows[pool[a]]
            row_b = dataset.rows[pool[b]]
            new = list(row_a)
            dist_a = 0.0
            dist_b = 0.0
            for t, j in enumerate(cont_idx):
                u = float(rng.random())
                va, vb = float(row_a[j]), float(row_b[j])
                v = va + u * (vb - va)
                new[j] = v
                zs = (v - mu[t]) / sd[t]
                dist_a += (zs - std[a][t]) ** 2
                dist_b += (zs - std[b][t]) ** 2
            for j in cat_idx:
                new[j] = row_a[j] if rng.random() < 0.5 else row_b[j]
            new[target_j] = row_a[target_j] if dist_a <= dist_b else row_b[target_j]
            rows.append(tuple(new))
            parents.append((dataset.row_ids[pool[a]], dataset.row_ids[pool[b]]))
        return rows, parents


_BACKENDS: dict[str, GeneratorBackend] = {}


def register_backend(backend: GeneratorBackend) -> None:
    _BACKENDS[backend.name] = backend


register_backend(NearestNeighborInterpolator())


EXTERNAL_BACKEND_ENV = "DEBIASWB_EXTERNAL_BACKEND"


def resolve_backend(name: str) -> GeneratorBackend:
    """Registry name, ``module:attr`` import path, or the ``external``
    keyword (resolved through the DEBIASWB_EXTERNAL_BACKEND variable)."""
    if name in _BACKENDS:
        return _BACKENDS[name]
    if name == "external":
        ref = os.environ.get(EXTERNAL_BACKEND_ENV, "")
        if not ref:
            raise UnknownBackend(
                f"backend 'external' needs {EXTERNAL_BACKEND_ENV}=module:attr in the environment"
            )
        return resolve_backend(ref)
    if ":" in name:
        mod_name, attr = name.split(":", 1)
        try:
            mod = importlib.import_module(mod_name)
            backend = getattr(mod, attr)
        except (ImportError, AttributeError) as exc:
            raise UnknownBackend(f"cannot import backend {name!r}: {exc}") from None
        if callable(backend) and not hasattr(backend, "generate_rows"):
            backend = backend()
        return backend
    raise UnknownBackend(f"no backend named {name!r} (registered: {sorted(_BACKENDS)})")


def _batch_id(constraints: ConstraintSet, backend: str, seed: int, train_digest: str) -> str:
    blob = json.dumps(
        {"constraints": constraints.to_dict(), "backend": backend, "seed": seed, "train": train_digest},
        sort_keys=True,
    ).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def generate(
    constraints: ConstraintSet,
    dataset: TabularDataset,
    model: ModelArtifact,
    backend: str = "nn",
    seed: int = 0,
    cap: int = DEFAULT_GENERATION_CAP,
    warning_threshold: float = DEFAULT_WARNING_RATIO,
    quality_fences: dict | None = None,
) -> GeneratedBatch:
    """Produce a constrained batch with per-row predictions and estimates.

    Every row satisfies its active region predicates (all regions in joint
    mode); this is asserted after generation, not assumed.
    """
    constraints.validate(dataset, cap)
    if not dataset.is_split:
        raise TooFewRows("dataset must be split before generating")
    gen = resolve_backend(backend)
    rng = np.random.default_rng(seed)

    all_rows: list[tuple] = []
    all_parents: list[tuple[str, str]] = []
    if constraints.constraints:
        if constraints.joint:
            pool = _matching_train_indices(dataset, constraints.constraints)
            if len(pool) == 0 and len(constraints.constraints) > 1:
                raise InfeasibleJointRegion("no train rows satisfy the joint region")
            if len(pool) < 2:
                raise NoMatchingRows(
                    f"{len(pool)} train row(s) match the region; the backend needs at least 2"
                )
            rows, parents = gen.generate_rows(dataset, pool, constraints.total_requested, rng)
            all_rows.extend(rows)
            all_parents.extend(parents)
        else:
            for c in constraints.constraints:
                pool = _matching_train_indices(dataset, [c])
                if len(pool) < 2:
                    raise NoMatchingRows(
                        f"{c.variable}: {len(pool)} train row(s) match; the backend needs at least 2"
                    )
                rows, parents = gen.generate_rows(dataset, pool, c.requested_count, rng)
                all_rows.extend(rows)
                all_parents.extend(parents)

    if len(all_rows) > cap:
        raise CapExceeded(f"backend produced {len(all_rows)} rows, cap is {cap}")

    batch_id = _batch_id(constraints, gen.name if backend in _BACKENDS else backend, seed, dataset.train_digest())
    n = len(all_rows)
    batch_rows = TabularDataset(
        schema=dataset.schema,
        rows=tuple(all_rows),
        row_ids=tuple(f"{batch_id}-{i:05d}" for i in range(n)),
        provenance=("generated",) * n,
        split_tag=("unsplit",) * n,
    )

    # machine-check the constraint predicates on the finished batch
    def check(row_i: int, scope: Sequence[SegmentConstraint]) -> None:
        row = batch_rows.rows[row_i]
        for sc in scope:
            if not sc.matches(row[batch_rows._col_index[sc.variable]]):
                raise InfeasibleJointRegion(
                    f"generated row {batch_rows.row_ids[row_i]} violates the {sc.variable} region"
                )

    if constraints.joint:
        for i in range(n):
            check(i, constraints.constraints)
    else:
        offset = 0
        for c in constraints.constraints:
            for i in range(offset, offset + c.requested_count):
                check(i, [c])
            offset += c.requested_count

    predictions = tuple(predict_rows(model, batch_rows, range(n)))
    if n:
        target_j = batch_rows.target_index
        hits = sum(
            p.predicted_class == row[target_j] for p, row in zip(predictions, batch_rows.rows)
        )
        estimated_accuracy = hits / n
        if quality_fences is None:
            orig = [i for i, p in enumerate(dataset.provenance) if p == "original"]
            quality_fences = iqr_fences(dataset, orig or None)
        estimated_quality = quality_report(batch_rows, fences=quality_fences)
    else:
        estimated_accuracy = None
        estimated_quality = None

    return GeneratedBatch(
        batch_id=batch_id,
        generator_id=f"{backend}:{seed}",
        rows=batch_rows,
        predictions=predictions,
        parent_ids=tuple(all_parents),
        warnings=tuple(plan(constraints, dataset, warning_threshold, cap)),
        estimated_accuracy=estimated_accuracy,
        estimated_quality=estimated_quality,
        constraints=constraints,
    )


def _segment_constraint(var, seg, count: int) -> SegmentConstraint:
    if seg.categories is not None:
        return SegmentConstraint(variable=var.name, requested_count=count, categories=seg.categories)
    return SegmentConstraint(variable=var.name, requested_count=count, lo=seg.lo, hi=seg.hi, hi_open=True)


def naive_autotune(
    dataset: TabularDataset,
    model: ModelArtifact | None = None,
    budget: int = 4,
    grid: Sequence[int] | None = None,
    threshold: int | None = None,
    rr_scope: str = "variables",
    cap: int = DEFAULT_GENERATION_CAP,
) -> ConstraintSet:
    """Grid search over per-segment generation counts maximizing RR + CR.

    The search simulates merges at the count level (no retraining, no
    generation). Candidate segments are the under-represented ones with at
    least two matching train rows; the grid for each is either the explicit
    ``grid`` or ``budget`` evenly spaced counts from 0 up to the gap to the
    variable's peak count. Ties prefer fewer generated rows, then the
    lexicographically smallest assignment in variable/segment order.
    """
    if grid is None and budget < 1:
        raise TooFewRows("budget must be at least 1 grid point")
    counts_by_var = segment_count_table(dataset)
    if threshold is None:
        threshold = default_coverage_threshold(len(dataset.train_indices))

    chosen: list[SegmentConstraint] = []
    total_added = 0
    base_counts = {v: dict(c) for v, c in counts_by_var.items()}

    for var in dataset.predictors:
        counts = base_counts[var.name]
        peak = max(counts.values())
        segments = [s for s in var.segments() if counts[s.label] < peak]
        # the backend needs two parents per region
        segments = [
            s for s in segments
            if len(_matching_train_indices(dataset, [_segment_constraint(var, s, 1)])) >= 2
        ]
        if not segments:
            continue

        grids = []
        for s in segments:
            if grid is not None:
                values = sorted(set(int(g) for g in grid if g >= 0) | {0})
            else:
                gap = peak - counts[s.label]
                values = sorted({round(gap * i / max(budget - 1, 1)) for i in range(budget)} | {0})
            grids.append(values)

        best = None  # (-objective, added, assignment)
        def walk(i: int, assignment: tuple[int, ...]):
            nonlocal best
            if i == len(segments):
                sim = {v: dict(c) for v, c in base_counts.items()}
                for s, add in zip(segments, assignment):
                    sim[var.name][s.label] += add
                rr, cr = aggregate_from_counts(sim, threshold, rr_scope)
                key = (-(rr + cr), sum(assignment), assignment)
                if best is None or key < best:
                    best = key
                return
            for v in grids[i]:
                walk(i + 1, assignment + (v,))

        walk(0, ())
        _, added, assignment = best
        total_added += added
        for s, add in zip(segments, assignment):
            if add > 0:
                chosen.append(_segment_constraint(var, s, add))
                base_counts[var.name][s.label] += add

    out = ConstraintSet(constraints=tuple(chosen), joint=False)
    out.validate(dataset, cap)
    return out
