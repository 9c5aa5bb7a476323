"""Variable schemas, segment partitions and segment lookup.

Each variable is segmented into discrete sub-groups: continuous variables by
ordered bin edges (half-open bins, last edge may be +inf), categorical and
binary variables by their category list. Segments of a variable are pairwise
disjoint and jointly cover the variable's domain.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Sequence

from .errors import OutOfDomain, SchemaMismatch

KINDS = ("continuous", "categorical", "binary")
ROLES = ("predictor", "target")
GROUPS = ("physical", "diagnostic", "lifestyle", "history")


@dataclass(frozen=True)
class Segment:
    """One sub-group of a variable: a continuous bin or a category subset."""

    variable: str
    label: str
    lo: float | None = None       # continuous bin [lo, hi)
    hi: float | None = None
    categories: tuple[str, ...] | None = None

    def contains(self, value) -> bool:
        if self.categories is not None:
            return value in self.categories
        return self.lo <= value < self.hi

    def to_dict(self) -> dict:
        d: dict = {"variable": self.variable, "label": self.label}
        if self.categories is not None:
            d["categories"] = list(self.categories)
        else:
            d["lo"] = _edge_out(self.lo)
            d["hi"] = _edge_out(self.hi)
        return d


def _edge_in(v) -> float:
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return math.inf
        if s == "-inf":
            return -math.inf
        return float(v)
    if v is None:
        return math.inf
    return float(v)


def _edge_out(v: float):
    if v == math.inf:
        return "inf"
    if v == -math.inf:
        return "-inf"
    return v


def _interval_label(lo: float, hi: float) -> str:
    def fmt(x: float) -> str:
        if x in (math.inf, -math.inf):
            return "inf" if x > 0 else "-inf"
        return f"{x:g}"

    return f"[{fmt(lo)}, {fmt(hi)})"


@dataclass(frozen=True)
class VariableSchema:
    """Typed description of one column, including its segmentation."""

    name: str
    kind: str                     # continuous | categorical | binary
    role: str = "predictor"      # predictor | target
    group: str = "physical"      # physical | diagnostic | lifestyle | history
    unit: str = ""
    bin_edges: tuple[float, ...] | None = None
    bin_labels: tuple[str, ...] | None = None
    categories: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaMismatch(f"variable {self.name!r}: unknown kind {self.kind!r}")
        if self.role not in ROLES:
            raise SchemaMismatch(f"variable {self.name!r}: unknown role {self.role!r}")
        if self.group not in GROUPS:
            raise SchemaMismatch(f"variable {self.name!r}: unknown group {self.group!r}")
        if self.kind == "continuous":
            if self.categories is not None:
                raise SchemaMismatch(f"variable {self.name!r}: continuous variables take bin edges, not categories")
            if self.bin_edges is not None:
                object.__setattr__(self, "bin_edges", tuple(float(e) for e in self.bin_edges))
                edges = self.bin_edges
                if len(edges) < 2:
                    raise SchemaMismatch(f"variable {self.name!r}: need at least two bin edges")
                if any(a >= b for a, b in zip(edges, edges[1:])):
                    raise SchemaMismatch(f"variable {self.name!r}: bin edges must be strictly increasing")
                if self.bin_labels is not None and len(self.bin_labels) != len(edges) - 1:
                    raise SchemaMismatch(f"variable {self.name!r}: expected {len(edges) - 1} bin labels")
        else:
            if self.bin_edges is not None or self.bin_labels is not None:
                raise SchemaMismatch(f"variable {self.name!r}: {self.kind} variables take categories, not bin edges")
            if not self.categories:
                raise SchemaMismatch(f"variable {self.name!r}: category list must be non-empty")
            if len(set(self.categories)) != len(self.categories):
                raise SchemaMismatch(f"variable {self.name!r}: duplicate categories")
            if self.kind == "binary" and len(self.categories) != 2:
                raise SchemaMismatch(f"variable {self.name!r}: binary variables take exactly two categories")

    # -- domain ---------------------------------------------------------

    def contains(self, value) -> bool:
        if self.kind == "continuous":
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                return False
            if math.isnan(value):
                return False
            if self.bin_edges is None:
                return True
            return self.bin_edges[0] <= value < self.bin_edges[-1]
        return value in self.categories

    @property
    def segmented(self) -> bool:
        return self.kind != "continuous" or self.bin_edges is not None

    @cached_property
    def _segments(self) -> tuple[Segment, ...]:
        if self.kind != "continuous":
            return tuple(Segment(self.name, c, categories=(c,)) for c in self.categories)
        if self.bin_edges is None:
            raise SchemaMismatch(f"variable {self.name!r}: no segmentation declared yet")
        out = []
        for i, (lo, hi) in enumerate(zip(self.bin_edges, self.bin_edges[1:])):
            label = self.bin_labels[i] if self.bin_labels else _interval_label(lo, hi)
            out.append(Segment(self.name, label, lo=lo, hi=hi))
        return tuple(out)

    def segments(self) -> tuple[Segment, ...]:
        return self._segments

    def segment_of(self, value) -> Segment:
        if not self.contains(value):
            raise OutOfDomain(f"value {value!r} outside the domain of variable {self.name!r}")
        segments = self._segments
        if self.kind != "continuous":
            return segments[self.categories.index(value)]
        edges = self.bin_edges
        # rightmost edge <= value; domain check above guarantees a hit
        idx = 0
        for i in range(len(edges) - 1):
            if edges[i] <= value < edges[i + 1]:
                idx = i
                break
        return segments[idx]

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        seg = None
        if self.kind == "continuous":
            if self.bin_edges is not None:
                seg = {"edges": [_edge_out(e) for e in self.bin_edges]}
                if self.bin_labels:
                    seg["labels"] = list(self.bin_labels)
        else:
            seg = list(self.categories)
        return {
            "name": self.name,
            "kind": self.kind,
            "unit": self.unit,
            "role": self.role,
            "group": self.group,
            "segmentation": seg,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VariableSchema":
        seg = d.get("segmentation")
        edges = labels = cats = None
        kind = d.get("kind", "")
        if kind == "continuous":
            if isinstance(seg, dict):
                edges = tuple(_edge_in(e) for e in seg.get("edges", ()))
                if seg.get("labels"):
                    labels = tuple(seg["labels"])
            elif isinstance(seg, (list, tuple)):
                edges = tuple(_edge_in(e) for e in seg)
        elif seg is not None:
            cats = tuple(str(c) for c in seg)
        return cls(
            name=d["name"],
            kind=kind,
            role=d.get("role", "predictor"),
            group=d.get("group", "physical"),
            unit=d.get("unit", ""),
            bin_edges=edges or None,
            bin_labels=labels,
            categories=cats,
        )


def segment_of(value, schema: VariableSchema) -> Segment:
    """Map one in-domain cell value to its unique segment."""
    return schema.segment_of(value)


def quantile(sorted_values: Sequence[float], q: float) -> float:
    """Linear-interpolation quantile on pre-sorted values (h = (n-1)q)."""
    n = len(sorted_values)
    if n == 0:
        raise ValueError("quantile of empty sequence")
    if n == 1:
        return float(sorted_values[0])
    h = (n - 1) * q
    lo = math.floor(h)
    hi = min(lo + 1, n - 1)
    frac = h - lo
    return float(sorted_values[lo]) + frac * (float(sorted_values[hi]) - float(sorted_values[lo]))


def quartile_edges(values: Sequence[float]) -> tuple[float, ...]:
    """Default segmentation for continuous variables without declared bins.

    Quartile cut points with open outer bounds, so every future value stays
    in-domain after the bins are frozen. Degenerate (constant-ish) columns
    collapse to fewer bins.
    """
    vals = sorted(float(v) for v in values)
    if not vals:
        raise ValueError("cannot derive bins from an empty column")
    cuts = [quantile(vals, q) for q in (0.25, 0.5, 0.75)]
    edges: list[float] = [-math.inf]
    for c in cuts:
        if c > edges[-1]:
            edges.append(c)
    edges.append(math.inf)
    return tuple(edges)


def load_schema(data: bytes | str) -> tuple[VariableSchema, ...]:
    """Parse the JSON sidecar: an array of variable descriptions."""
    obj = json.loads(data)
    if not isinstance(obj, list) or not obj:
        raise SchemaMismatch("schema sidecar must be a non-empty JSON array")
    out = tuple(VariableSchema.from_dict(d) for d in obj)
    names = [s.name for s in out]
    if len(set(names)) != len(names):
        raise SchemaMismatch("duplicate variable names in schema")
    return out


def dump_schema(schema: Sequence[VariableSchema]) -> str:
    return json.dumps([s.to_dict() for s in schema], indent=2)


def with_default_bins(schema: VariableSchema, values: Sequence[float]) -> VariableSchema:
    return replace(schema, bin_edges=quartile_edges(values), bin_labels=None)
