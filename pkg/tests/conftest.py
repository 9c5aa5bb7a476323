import math
import random

import pytest

from debiaswb.dataset import TabularDataset, ingest, split
from debiaswb.gbdt import GBDTParams
from debiaswb.model import train
from debiaswb.schema import VariableSchema

TINY_PARAMS = GBDTParams(n_trees=6, max_depth=3, min_samples_leaf=2)


def toy_schema():
    return (
        VariableSchema("age", "continuous", group="physical", unit="years",
                       bin_edges=(20.0, 40.0, 60.0, 90.0)),
        VariableSchema("bmi", "continuous", group="physical", unit="kg/m2",
                       bin_edges=(15.0, 25.0, 30.0, 50.0)),
        VariableSchema("smoker", "binary", group="lifestyle", categories=("no", "yes")),
        VariableSchema("risk", "binary", role="target", categories=("low", "high")),
    )


def toy_csv(n=240, seed=9):
    rng = random.Random(seed)
    lines = ["age,bmi,smoker,risk"]
    for _ in range(n):
        age = rng.uniform(20, 89)
        bmi = rng.uniform(16, 48)
        smoker = "yes" if rng.random() < 0.3 else "no"
        z = 0.07 * (age - 50) + 0.10 * (bmi - 28) + 1.0 * (smoker == "yes")
        risk = "high" if rng.random() < 1 / (1 + math.exp(-z)) else "low"
        lines.append(f"{age!r},{bmi!r},{smoker},{risk}")
    return "\n".join(lines).encode()


def make_toy_dataset(n=240, seed=9, heldout=0.25, split_seed=3) -> TabularDataset:
    return split(ingest(toy_csv(n, seed), toy_schema()), heldout, split_seed)


def random_dataset(rng: random.Random, max_rows=500, max_predictors=5) -> TabularDataset:
    """Random small dataset with mixed variable kinds for oracle suites."""
    n_pred = rng.randint(1, max_predictors)
    schema = []
    for i in range(n_pred):
        if rng.random() < 0.5:
            lo = rng.uniform(-20, 0)
            cuts = sorted(rng.uniform(1, 80) for _ in range(rng.randint(1, 3)))
            edges = [lo] + [lo + c for c in cuts] + [math.inf]
            schema.append(VariableSchema(f"x{i}", "continuous", bin_edges=tuple(edges)))
        else:
            cats = tuple(f"c{j}" for j in range(rng.randint(2, 4)))
            schema.append(VariableSchema(f"x{i}", "categorical", categories=cats))
    classes = tuple(f"t{j}" for j in range(rng.randint(2, 3)))
    schema.append(VariableSchema("y", "categorical", role="target", categories=classes))
    schema = tuple(schema)

    n = rng.randint(24, max_rows)
    rows = []
    for _ in range(n):
        row = []
        for s in schema[:-1]:
            if s.kind == "continuous":
                row.append(rng.uniform(s.bin_edges[0], s.bin_edges[0] + 95))
            else:
                row.append(rng.choice(s.categories))
        # target loosely tied to the first predictor so models have signal
        first = row[0]
        if schema[0].kind == "continuous":
            bias = 0 if first < schema[0].bin_edges[0] + 40 else 1
        else:
            bias = 0 if first == schema[0].categories[0] else 1
        if rng.random() < 0.7:
            row.append(classes[bias % len(classes)])
        else:
            row.append(rng.choice(classes))
        rows.append(tuple(row))

    # stratification needs two rows per class
    for k, cls in enumerate(classes):
        rows.append(rows[k][:-1] + (cls,))
        rows.append(rows[k + 1][:-1] + (cls,))
    n = len(rows)
    return TabularDataset(
        schema=schema,
        rows=tuple(rows),
        row_ids=tuple(f"o{i:05d}" for i in range(n)),
        provenance=("original",) * n,
        split_tag=("unsplit",) * n,
    )


@pytest.fixture(scope="session")
def toy_session_data():
    dataset = make_toy_dataset()
    model = train(dataset, GBDTParams(n_trees=20, max_depth=3), seed=0)
    return dataset, model
