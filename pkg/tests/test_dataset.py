import math
import random

import pytest

from debiaswb.dataset import TabularDataset, ingest, segment_counts, split
from debiaswb.errors import (
    AlreadySplit,
    CellParseError,
    EmptyDataset,
    LeakageViolation,
    SchemaMismatch,
    TooFewRows,
)
from debiaswb.schema import VariableSchema

from .conftest import toy_csv, toy_schema
from .oracles import segment_counts_oracle


def two_col_schema():
    return (
        VariableSchema("x", "continuous", bin_edges=(-math.inf, 0.0, math.inf)),
        VariableSchema("y", "binary", role="target", categories=("a", "b")),
    )


def test_ingest_counts_rows_and_roles():
    ds = ingest(toy_csv(), toy_schema())
    assert len(ds) == 240
    assert len(ds.predictors) == 3
    assert ds.target.name == "risk"
    assert set(ds.provenance) == {"original"}
    assert set(ds.split_tag) == {"unsplit"}


def test_ingest_header_only_is_empty():
    with pytest.raises(EmptyDataset):
        ingest(b"x,y\n", two_col_schema())


def test_ingest_rejects_unknown_and_missing_columns():
    with pytest.raises(SchemaMismatch):
        ingest(b"x,y,z\n1,a,2\n", two_col_schema())
    with pytest.raises(SchemaMismatch):
        ingest(b"x\n1\n", two_col_schema())


def test_ingest_reports_bad_cells_with_position():
    with pytest.raises(CellParseError) as err:
        ingest(b"x,y\n1.5,a\nnope,b\n", two_col_schema())
    assert err.value.detail["row"] == 2
    assert err.value.detail["column"] == "x"
    assert err.value.detail["raw"] == "nope"


def test_ingest_rejects_out_of_category_cells():
    with pytest.raises(CellParseError):
        ingest(b"x,y\n1.0,weird\n", two_col_schema())


def test_ingest_accepts_reordered_columns():
    ds = ingest(b"y,x\na,1.5\nb,-2.0\n", two_col_schema())
    assert ds.rows[0] == (1.5, "a")


def test_round_trip_preserves_cell_bytes():
    rng = random.Random(21)
    lines = ["x,y"]
    for _ in range(100):
        lines.append(f"{rng.uniform(-50, 50)!r},{rng.choice('ab')}")
    original = ("\n".join(lines) + "\n").encode()
    ds = ingest(original, two_col_schema())
    assert ds.to_csv_bytes() == original
    again = ingest(ds.to_csv_bytes(), two_col_schema())
    assert again.rows == ds.rows


def test_split_is_deterministic_and_exact():
    lines = ["x,y"] + [f"{i}.5,{'a' if i % 2 else 'b'}" for i in range(1000)]
    data = "\n".join(lines).encode()
    ds1 = split(ingest(data, two_col_schema()), 0.2, seed=7)
    ds2 = split(ingest(data, two_col_schema()), 0.2, seed=7)
    assert len(ds1.train_indices) == 800
    assert len(ds1.heldout_indices) == 200
    assert ds1.split_tag == ds2.split_tag
    assert ds1.train_ids.isdisjoint(ds1.heldout_ids)


def test_split_rejects_resplit_and_tiny_classes():
    ds = split(ingest(toy_csv(), toy_schema()), 0.2, 1)
    with pytest.raises(AlreadySplit):
        split(ds, 0.2, 1)
    tiny = ingest(b"x,y\n1.0,a\n2.0,a\n3.0,a\n4.0,b\n", two_col_schema())
    with pytest.raises(TooFewRows):
        split(tiny, 0.2, 1)


def test_split_rejects_single_class_data():
    # four rows of one class: the other declared class cannot be stratified
    single = ingest(b"x,y\n1.0,a\n2.0,a\n3.0,a\n4.0,a\n", two_col_schema())
    with pytest.raises(TooFewRows):
        split(single, 0.2, 1)


def test_ingest_rejects_non_finite_cells():
    with pytest.raises(CellParseError):
        ingest(b"x,y\ninf,a\n", two_col_schema())
    with pytest.raises(CellParseError):
        ingest(b"x,y\nnan,a\n", two_col_schema())


def test_split_keeps_minority_share_within_two_points():
    rng = random.Random(4)
    lines = ["x,y"]
    for i in range(1000):
        lines.append(f"{rng.uniform(0, 1)!r},{'a' if i < 900 else 'b'}")
    ds = split(ingest("\n".join(lines).encode(), two_col_schema()), 0.2, seed=5)
    held = [ds.rows[i][1] for i in ds.heldout_indices]
    minority_share = held.count("b") / len(held)
    assert 0.08 <= minority_share <= 0.12


def test_split_freezes_quartile_bins_from_train_rows():
    schema = (
        VariableSchema("x", "continuous"),  # no declared bins
        VariableSchema("y", "binary", role="target", categories=("a", "b")),
    )
    rng = random.Random(2)
    lines = ["x,y"] + [f"{rng.uniform(0, 10)!r},{rng.choice('ab')}" for _ in range(80)]
    ds = split(ingest("\n".join(lines).encode(), schema), 0.25, seed=1)
    x = ds.variable("x")
    assert x.bin_edges is not None
    assert x.bin_edges[0] == -math.inf and x.bin_edges[-1] == math.inf
    counts = segment_counts(ds, "x")
    assert sum(counts.values()) == len(ds)


def test_segment_counts_match_hand_binning():
    ds = split(ingest(toy_csv(), toy_schema()), 0.25, 3)
    for var in ("age", "bmi", "smoker"):
        assert segment_counts(ds, var, ds.train_indices) == \
            segment_counts_oracle(ds, var, ds.train_indices)
        total = segment_counts(ds, var)
        assert sum(total.values()) == len(ds)


def test_heldout_rows_must_stay_original():
    ds = split(ingest(toy_csv(), toy_schema()), 0.25, 3)
    i = ds.heldout_indices[0]
    prov = list(ds.provenance)
    prov[i] = "generated"
    with pytest.raises(LeakageViolation):
        TabularDataset(ds.schema, ds.rows, ds.row_ids, tuple(prov), ds.split_tag)


def test_row_ids_must_be_unique():
    ds = ingest(toy_csv(), toy_schema())
    ids = list(ds.row_ids)
    ids[1] = ids[0]
    with pytest.raises(SchemaMismatch):
        TabularDataset(ds.schema, ds.rows, tuple(ids), ds.provenance, ds.split_tag)


def test_digest_tracks_content_and_train_digest_ignores_order():
    ds = split(ingest(toy_csv(), toy_schema()), 0.25, 3)
    assert ds.digest() == split(ingest(toy_csv(), toy_schema()), 0.25, 3).digest()
    edited = ds.with_cell(ds.row_ids[0], "age", 33.0)
    assert edited.digest() != ds.digest()
    perm = list(range(len(ds)))
    random.Random(0).shuffle(perm)
    shuffled = ds.subset(perm)
    assert shuffled.train_digest() == ds.train_digest()
