"""Histogram-based gradient-boosted decision trees (multiclass, Newton steps).

Self-contained booster: features are quantized into at most ``max_bins`` bins,
split gains come from cumulative gradient/hessian histograms, leaf values are
regularized Newton steps. Training is fully deterministic: no subsampling, no
threading, ties broken by (feature index, bin index).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GBDTParams:
    n_trees: int = 200
    max_depth: int = 6
    learning_rate: float = 0.1
    min_samples_leaf: int = 5
    l2: float = 1.0
    max_bins: int = 64

    def to_dict(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "min_samples_leaf": self.min_samples_leaf,
            "l2": self.l2,
            "max_bins": self.max_bins,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GBDTParams":
        return cls(**{k: d[k] for k in cls().to_dict() if k in d})


@dataclass
class Tree:
    """Flat array encoding; feature == -1 marks a leaf."""

    feature: np.ndarray      # int32
    threshold_bin: np.ndarray  # int32, go left iff bin <= threshold_bin
    left: np.ndarray         # int32
    right: np.ndarray        # int32
    value: np.ndarray        # float64, leaf contribution (already shrunk)

    def apply(self, binned: np.ndarray) -> np.ndarray:
        n = binned.shape[0]
        node = np.zeros(n, dtype=np.int32)
        while True:
            feat = self.feature[node]
            active = feat >= 0
            if not active.any():
                break
            rows = np.nonzero(active)[0]
            f = feat[rows]
            go_left = binned[rows, f] <= self.threshold_bin[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])
        return self.value[node]


def _bin_thresholds(col: np.ndarray, max_bins: int) -> np.ndarray:
    """Cut points between bins; bin(x) = searchsorted(thresholds, x, 'right')."""
    uniq = np.unique(col)
    if len(uniq) <= 1:
        return np.empty(0, dtype=np.float64)
    if len(uniq) <= max_bins:
        return (uniq[:-1] + uniq[1:]) / 2.0
    qs = np.quantile(col, np.linspace(0, 1, max_bins + 1)[1:-1])
    return np.unique(qs)


class Quantizer:
    """Per-feature bin cut points learned on the train matrix."""

    def __init__(self, X: np.ndarray, max_bins: int):
        self.thresholds = [_bin_thresholds(X[:, j], max_bins) for j in range(X.shape[1])]
        self.n_bins = np.array([len(t) + 1 for t in self.thresholds], dtype=np.int32)

    def transform(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape, dtype=np.int32)
        for j, thr in enumerate(self.thresholds):
            out[:, j] = np.searchsorted(thr, X[:, j], side="right") if len(thr) else 0
        return out

    def to_dict(self) -> dict:
        return {"thresholds": [t.tolist() for t in self.thresholds]}

    @classmethod
    def from_dict(cls, d: dict) -> "Quantizer":
        obj = cls.__new__(cls)
        obj.thresholds = [np.asarray(t, dtype=np.float64) for t in d["thresholds"]]
        obj.n_bins = np.array([len(t) + 1 for t in obj.thresholds], dtype=np.int32)
        return obj


class _SplitScan:
    """Precomputed flattened-histogram layout shared by every tree of a fit.

    Per-feature bins map into one flat index space so a node needs only three
    bincounts and one cumulative sum for all features at once; split
    candidates are scored as a single vectorized expression. Candidate order
    is (feature, bin), so argmax tie-breaking stays deterministic.
    """

    def __init__(self, binned: np.ndarray, n_bins: np.ndarray):
        self.n_features = binned.shape[1]
        offsets = np.concatenate(([0], np.cumsum(n_bins))).astype(np.int64)
        self.offsets = offsets
        self.total_bins = int(offsets[-1])
        self.binned = binned
        self.flat = (binned.astype(np.int64) + offsets[:-1][None, :]).ravel()

        cand_feature = []
        cand_bin = []
        for j in range(self.n_features):
            for b in range(int(n_bins[j]) - 1):
                cand_feature.append(j)
                cand_bin.append(b)
        self.cand_feature = np.asarray(cand_feature, dtype=np.int64)
        self.cand_bin = np.asarray(cand_bin, dtype=np.int64)
        self.cand_pos = offsets[self.cand_feature] + self.cand_bin
        self.cand_start = offsets[self.cand_feature]

    def node_rows(self, idx: np.ndarray) -> np.ndarray:
        # flat bin ids of the node's rows, all features side by side
        return self.flat.reshape(-1, self.n_features)[idx].ravel()


def _grow_tree(
    scan: _SplitScan,
    grad: np.ndarray,
    hess: np.ndarray,
    params: GBDTParams,
) -> Tree:
    feature: list[int] = []
    threshold: list[int] = []
    left: list[int] = []
    right: list[int] = []
    value: list[float] = []

    def new_node() -> int:
        feature.append(-1)
        threshold.append(-1)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    lam = params.l2
    min_leaf = params.min_samples_leaf
    p = scan.n_features
    binned = scan.binned
    root = new_node()
    stack = [(root, np.arange(binned.shape[0]), 0)]

    while stack:
        node, idx, depth = stack.pop()
        g_node = grad[idx]
        h_node = hess[idx]
        g_sum = float(g_node.sum())
        h_sum = float(h_node.sum())

        def make_leaf() -> None:
            value[node] = float(-params.learning_rate * g_sum / (h_sum + lam))

        if (depth >= params.max_depth or len(idx) < 2 * min_leaf
                or len(scan.cand_pos) == 0):
            make_leaf()
            continue

        flat = scan.node_rows(idx)
        hist_g = np.bincount(flat, weights=np.repeat(g_node, p), minlength=scan.total_bins)
        hist_h = np.bincount(flat, weights=np.repeat(h_node, p), minlength=scan.total_bins)
        hist_n = np.bincount(flat, minlength=scan.total_bins)
        cum_g = np.concatenate(([0.0], np.cumsum(hist_g)))
        cum_h = np.concatenate(([0.0], np.cumsum(hist_h)))
        cum_n = np.concatenate(([0], np.cumsum(hist_n)))

        gl = cum_g[scan.cand_pos + 1] - cum_g[scan.cand_start]
        hl = cum_h[scan.cand_pos + 1] - cum_h[scan.cand_start]
        nl = cum_n[scan.cand_pos + 1] - cum_n[scan.cand_start]
        ok = (nl >= min_leaf) & (len(idx) - nl >= min_leaf)
        gr = g_sum - gl
        hr = h_sum - hl
        parent_score = g_sum * g_sum / (h_sum + lam)
        with np.errstate(divide="ignore", invalid="ignore"):
            gains = np.where(
                ok,
                gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent_score,
                -np.inf,
            )
        k = int(np.argmax(gains))
        if not np.isfinite(gains[k]) or gains[k] <= 1e-12:
            make_leaf()
            continue

        j = int(scan.cand_feature[k])
        thr = int(scan.cand_bin[k])
        mask = binned[idx, j] <= thr
        l_node = new_node()
        r_node = new_node()
        feature[node] = j
        threshold[node] = thr
        left[node] = l_node
        right[node] = r_node
        # push right first so the left child is processed (and numbered) first
        stack.append((r_node, idx[~mask], depth + 1))
        stack.append((l_node, idx[mask], depth + 1))

    return Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold_bin=np.asarray(threshold, dtype=np.int32),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64),
    )


def _softmax(F: np.ndarray) -> np.ndarray:
    z = F - F.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


@dataclass
class Booster:
    """Fitted ensemble: one tree per class per boosting round."""

    params: GBDTParams
    n_classes: int
    base_score: np.ndarray = field(default_factory=lambda: np.zeros(0))
    quantizer: Quantizer | None = None
    trees: list = field(default_factory=list)  # list of rounds, each a list of K trees

    @classmethod
    def fit(cls, X: np.ndarray, y: np.ndarray, n_classes: int, params: GBDTParams) -> "Booster":
        n = X.shape[0]
        quantizer = Quantizer(X, params.max_bins)
        binned = quantizer.transform(X)
        scan = _SplitScan(binned, quantizer.n_bins)
        counts = np.bincount(y, minlength=n_classes).astype(np.float64)
        priors = np.clip(counts / n, 1e-12, None)
        base = np.log(priors)
        F = np.tile(base, (n, 1))
        onehot = np.eye(n_classes)[y]
        booster = cls(params=params, n_classes=n_classes, base_score=base, quantizer=quantizer)
        for _ in range(params.n_trees):
            P = _softmax(F)
            round_trees = []
            for k in range(n_classes):
                g = P[:, k] - onehot[:, k]
                h = P[:, k] * (1.0 - P[:, k])
                tree = _grow_tree(scan, g, h, params)
                F[:, k] += tree.apply(binned)
                round_trees.append(tree)
            booster.trees.append(round_trees)
        return booster

    def raw_scores(self, X: np.ndarray) -> np.ndarray:
        binned = self.quantizer.transform(X)
        F = np.tile(self.base_score, (X.shape[0], 1))
        for round_trees in self.trees:
            for k, tree in enumerate(round_trees):
                F[:, k] += tree.apply(binned)
        return F

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return _softmax(self.raw_scores(X))

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "n_classes": self.n_classes,
            "base_score": self.base_score.tolist(),
            "quantizer": self.quantizer.to_dict(),
            "trees": [
                [
                    {
                        "feature": t.feature.tolist(),
                        "threshold_bin": t.threshold_bin.tolist(),
                        "left": t.left.tolist(),
                        "right": t.right.tolist(),
                        "value": t.value.tolist(),
                    }
                    for t in round_trees
                ]
                for round_trees in self.trees
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Booster":
        trees = [
            [
                Tree(
                    feature=np.asarray(t["feature"], dtype=np.int32),
                    threshold_bin=np.asarray(t["threshold_bin"], dtype=np.int32),
                    left=np.asarray(t["left"], dtype=np.int32),
                    right=np.asarray(t["right"], dtype=np.int32),
                    value=np.asarray(t["value"], dtype=np.float64),
                )
                for t in round_trees
            ]
            for round_trees in d["trees"]
        ]
        return cls(
            params=GBDTParams.from_dict(d["params"]),
            n_classes=d["n_classes"],
            base_score=np.asarray(d["base_score"], dtype=np.float64),
            quantizer=Quantizer.from_dict(d["quantizer"]),
            trees=trees,
        )
