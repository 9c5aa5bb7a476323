"""Fixed synthetic benchmark for generation-quality and debiasing experiments.

A deterministic health-style dataset with engineered representation bias:
most rows are young patients far from the outcome boundary, while the sparse
older bands straddle it. Generating heavily from those thin segments yields
unreliable labels, which is exactly the existing/requested-ratio degradation
the ratio sweep measures.
"""
from __future__ import annotations

import math
import random
from typing import Sequence

from .augment import ConstraintSet, SegmentConstraint, generate, matching_train_count
from .dataset import TabularDataset, ingest, split
from .gbdt import GBDTParams
from .model import ModelArtifact
from .schema import VariableSchema
from .session import SessionConfig

BENCHMARK_SEED = 20250
BENCHMARK_ROWS = 1300
BENCHMARK_SPLIT_SEED = 11
BENCHMARK_HELDOUT_FRACTION = 0.25
BENCHMARK_COVERAGE_THRESHOLD = 30


def benchmark_schema() -> tuple[VariableSchema, ...]:
    return (
        VariableSchema("age", "continuous", group="physical", unit="years",
                       bin_edges=(20.0, 40.0, 55.0, 70.0, 90.0)),
        VariableSchema("bmi", "continuous", group="physical", unit="kg/m2",
                       bin_edges=(15.0, 24.0, 28.0, 33.0, 50.0)),
        VariableSchema("smoker", "binary", group="lifestyle", categories=("no", "yes")),
        VariableSchema("exercise", "categorical", group="lifestyle",
                       categories=("low", "mid", "high")),
        VariableSchema("risk", "binary", role="target", categories=("low", "high")),
    )


def benchmark_csv(seed: int = BENCHMARK_SEED, n: int = BENCHMARK_ROWS) -> bytes:
    rng = random.Random(seed)
    rows = ["age,bmi,smoker,exercise,risk"]
    for _ in range(n):
        r = rng.random()
        if r < 0.64:
            age = rng.uniform(20, 40)
        elif r < 0.88:
            age = rng.uniform(40, 55)
        elif r < 0.975:
            age = rng.uniform(55, 70)
        else:
            age = rng.uniform(70, 90)
        bmi = min(max(rng.gauss(27.5, 4.5), 15.0), 50.0)
        smoker = "yes" if rng.random() < 0.15 else "no"
        ex = rng.random()
        exercise = "low" if ex < 0.5 else ("mid" if ex < 0.85 else "high")
        z = 0.12 * (age - 68) + 0.07 * (bmi - 27) + 1.1 * (smoker == "yes") - 0.5 * (exercise == "high")
        p = 1.0 / (1.0 + math.exp(-z))
        risk = "high" if rng.random() < p else "low"
        rows.append(f"{age!r},{bmi!r},{smoker},{exercise},{risk}")
    return "\n".join(rows).encode()


def benchmark_dataset(seed: int = BENCHMARK_SEED, n: int = BENCHMARK_ROWS) -> TabularDataset:
    return split(ingest(benchmark_csv(seed, n), benchmark_schema()),
                 BENCHMARK_HELDOUT_FRACTION, BENCHMARK_SPLIT_SEED)


def benchmark_model_params() -> GBDTParams:
    return GBDTParams(n_trees=60, max_depth=4)


def benchmark_session_config() -> SessionConfig:
    return SessionConfig(
        heldout_fraction=BENCHMARK_HELDOUT_FRACTION,
        split_seed=BENCHMARK_SPLIT_SEED,
        model_params=benchmark_model_params(),
        coverage_threshold=BENCHMARK_COVERAGE_THRESHOLD,
    )


def ratio_probes() -> tuple[SegmentConstraint, ...]:
    """Single-region generation requests spanning existing/requested ratios
    from roughly 6 down to 0.27 on the benchmark dataset."""
    return (
        SegmentConstraint("age", 80, lo=20.0, hi=36.0),
        SegmentConstraint("age", 100, lo=24.0, hi=44.0),
        SegmentConstraint("age", 100, lo=40.0, hi=55.0, hi_open=True),
        SegmentConstraint("bmi", 120, lo=24.0, hi=28.0, hi_open=True),
        SegmentConstraint("exercise", 100, categories=("high",)),
        SegmentConstraint("smoker", 100, categories=("yes",)),
        SegmentConstraint("age", 100, lo=55.0, hi=70.0, hi_open=True),
        SegmentConstraint("age", 100, lo=70.0, hi=90.0, hi_open=True),
        SegmentConstraint("age", 150, lo=62.0, hi=90.0),
        SegmentConstraint("age", 100, lo=58.0, hi=75.0),
    )


def run_ratio_sweep(
    dataset: TabularDataset,
    model: ModelArtifact,
    seeds: Sequence[int],
    probes: Sequence[SegmentConstraint] | None = None,
) -> list[dict]:
    """One batch per (probe, seed); rows ordered by probe then seed."""
    if probes is None:
        probes = ratio_probes()
    out = []
    for constraint in probes:
        existing = matching_train_count(dataset, constraint)
        ratio = existing / constraint.requested_count
        for seed in seeds:
            batch = generate(ConstraintSet((constraint,), joint=True), dataset, model, seed=seed)
            out.append({
                "variable": constraint.variable,
                "region": constraint.to_dict(),
                "existing": existing,
                "requested": constraint.requested_count,
                "ratio": ratio,
                "log_ratio": math.log(ratio),
                "estimated_accuracy": batch.estimated_accuracy,
                "seed": seed,
            })
    return out


def ratio_group_means(sweep: Sequence[dict]) -> tuple[float, float]:
    """(mean estimated accuracy for ratio < 1, mean for ratio >= 1)."""
    lo = [r["estimated_accuracy"] for r in sweep if r["ratio"] < 1.0]
    hi = [r["estimated_accuracy"] for r in sweep if r["ratio"] >= 1.0]
    return sum(lo) / len(lo), sum(hi) / len(hi)
