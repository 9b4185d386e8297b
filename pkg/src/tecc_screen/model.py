"""Frame-level classifiers and recording-level score aggregation.

The gradient booster fits one regression tree per round to the gradient
and hessian of a weighted logistic loss. Features are histogram-quantized
(quantile bin edges); trees grow leaf-wise by best gain with deterministic
tie-breaking (lowest feature index, then lowest bin). The random forest
reuses the same binning with gini splits and majority voting.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, fields

import numpy as np
from scipy.special import expit

from .cepstral import FeatureMatrix
from .errors import DataError

_MIN_HESS = 1e-12  # guards leaf-value and gain denominators


@dataclass
class TreeNode:
    """Split node (left/right set) or leaf (left is None)."""

    feature_index: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class GBDTParams:
    num_trees: int = 100
    learning_rate: float = 0.1
    max_leaves: int = 31
    min_samples_leaf: int = 20
    max_bins: int = 255
    pos_weight: float | None = None  # None = auto (neg count / pos count)
    seed: int = 0
    lambda_l2: float = 1.0
    max_depth: int = 16

    def __post_init__(self):
        if self.num_trees < 1 or self.max_leaves < 2 or self.min_samples_leaf < 1:
            raise ValueError("tree counts and leaf limits must be positive")
        if not 0 < self.learning_rate <= 1:
            raise ValueError(f"learning_rate must be in (0, 1], got {self.learning_rate}")
        if not 2 <= self.max_bins <= 65000:
            raise ValueError(f"max_bins must be in [2, 65000], got {self.max_bins}")

    def replace(self, **kw) -> "GBDTParams":
        current = {f.name: getattr(self, f.name) for f in fields(self)}
        current.update(kw)
        return GBDTParams(**current)


@dataclass(frozen=True)
class RecordingScore:
    recording_id: str
    score: float
    num_frames: int


class _Binner:
    """Per-feature quantile bin edges; bin(x) = number of edges < x."""

    def __init__(self, edges: list[np.ndarray]):
        self.edges = edges
        self.num_bins = max(e.size + 1 for e in edges)

    @classmethod
    def fit(cls, X: np.ndarray, max_bins: int) -> "_Binner":
        edges = []
        inner = np.linspace(0.0, 1.0, max_bins + 1)[1:-1]
        for f in range(X.shape[1]):
            uniq = np.unique(X[:, f])
            if uniq.size <= max_bins:
                edges.append(uniq)
            else:
                edges.append(np.unique(np.quantile(X[:, f], inner)))
        return cls(edges)

    def transform(self, X: np.ndarray) -> np.ndarray:
        binned = np.empty(X.shape, dtype=np.uint16)
        for f, e in enumerate(self.edges):
            binned[:, f] = np.searchsorted(e, X[:, f], side="left")
        return binned

    def threshold_for(self, feature: int, bin_index: int) -> float:
        # split "bin <= b" is exactly "x <= edges[b]"
        return float(self.edges[feature][bin_index])


_CHUNK_ELEMENTS = 4_000_000


def _build_histograms(binned, idx, grad, hess, num_bins):
    """Sum of gradients, hessians, and counts per (feature, bin)."""
    n, d = idx.size, binned.shape[1]
    total = d * num_bins
    offsets = (np.arange(d, dtype=np.int64) * num_bins)[None, :]
    hg = np.zeros(total)
    hh = np.zeros(total)
    hc = np.zeros(total, dtype=np.int64)
    step = max(1, _CHUNK_ELEMENTS // d)
    for start in range(0, n, step):
        rows = idx[start : start + step]
        keys = (binned[rows].astype(np.int64) + offsets).ravel()
        hg += np.bincount(keys, weights=np.repeat(grad[rows], d), minlength=total)
        hh += np.bincount(keys, weights=np.repeat(hess[rows], d), minlength=total)
        hc += np.bincount(keys, minlength=total)
    return hg.reshape(d, num_bins), hh.reshape(d, num_bins), hc.reshape(d, num_bins)


def _best_split(hg, hh, hc, lam, min_leaf):
    """Max-gain (feature, bin) with ties going to the lowest feature then bin."""
    gl = np.cumsum(hg, axis=1)
    hl = np.cumsum(hh, axis=1)
    cl = np.cumsum(hc, axis=1)
    gt, ht, ct = gl[:, -1:], hl[:, -1:], cl[:, -1:]
    gr, hr, cr = gt - gl, ht - hl, ct - cl
    gain = 0.5 * (
        gl**2 / np.maximum(hl + lam, _MIN_HESS)
        + gr**2 / np.maximum(hr + lam, _MIN_HESS)
        - gt**2 / np.maximum(ht + lam, _MIN_HESS)
    )
    gain[(cl < min_leaf) | (cr < min_leaf)] = -np.inf
    flat = int(np.argmax(gain))
    feature, bin_index = divmod(flat, gain.shape[1])
    return float(gain[feature, bin_index]), feature, bin_index


class _LeafCandidate:
    __slots__ = ("node", "idx", "hists", "depth", "gain", "feature", "bin_index", "order")

    def __init__(self, node, idx, hists, depth, params, order):
        self.node = node
        self.idx = idx
        self.hists = hists
        self.depth = depth
        self.order = order
        if depth >= params.max_depth:
            self.gain, self.feature, self.bin_index = -np.inf, -1, -1
        else:
            self.gain, self.feature, self.bin_index = _best_split(
                *hists, params.lambda_l2, params.min_samples_leaf
            )


def _grow_tree(binned, grad, hess, params, binner):
    """One leaf-wise regression tree; returns (root, [(leaf_idx, leaf_value)])."""
    order = 0
    root = TreeNode()
    all_idx = np.arange(binned.shape[0])
    hists = _build_histograms(binned, all_idx, grad, hess, binner.num_bins)
    cand = _LeafCandidate(root, all_idx, hists, 0, params, order)
    heap = []
    if cand.gain > 0:
        heapq.heappush(heap, (-cand.gain, cand.order, cand))
    leaves = {id(root): cand}
    while heap and len(leaves) < params.max_leaves:
        _, _, cand = heapq.heappop(heap)
        node, idx = cand.node, cand.idx
        node.feature_index = cand.feature
        node.threshold = binner.threshold_for(cand.feature, cand.bin_index)
        mask = binned[idx, cand.feature] <= cand.bin_index
        left_idx, right_idx = idx[mask], idx[~mask]
        small_idx, large_idx = (
            (left_idx, right_idx) if left_idx.size <= right_idx.size else (right_idx, left_idx)
        )
        small_h = _build_histograms(binned, small_idx, grad, hess, binner.num_bins)
        large_h = tuple(p - s for p, s in zip(cand.hists, small_h))
        left_h, right_h = (
            (small_h, large_h) if small_idx is left_idx else (large_h, small_h)
        )
        node.left, node.right = TreeNode(), TreeNode()
        del leaves[id(node)]
        for child, child_idx, child_h in (
            (node.left, left_idx, left_h),
            (node.right, right_idx, right_h),
        ):
            order += 1
            child_cand = _LeafCandidate(child, child_idx, child_h, cand.depth + 1, params, order)
            leaves[id(child)] = child_cand
            if child_cand.gain > 0:
                heapq.heappush(heap, (-child_cand.gain, child_cand.order, child_cand))
    updates = []
    for cand in leaves.values():
        g = grad[cand.idx].sum()
        h = hess[cand.idx].sum()
        cand.node.value = -g / max(h + params.lambda_l2, _MIN_HESS)
        updates.append((cand.idx, cand.node.value))
    return root, updates


def _predict_tree(root: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0])
    stack = [(root, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if node.is_leaf:
            out[idx] = node.value
        else:
            mask = X[idx, node.feature_index] <= node.threshold
            stack.append((node.left, idx[mask]))
            stack.append((node.right, idx[~mask]))
    return out


def _weighted_logloss(y, w, p):
    p = np.clip(p, 1e-15, 1.0 - 1e-15)
    return float(np.sum(w * -(y * np.log(p) + (1 - y) * np.log(1 - p))) / np.sum(w))


@dataclass
class GBDTModel:
    trees: list[TreeNode]
    learning_rate: float
    base_score: float
    feature_dim: int
    params: GBDTParams
    train_logloss: list[float] = field(default_factory=list)

    @property
    def num_trees(self) -> int:
        return len(self.trees)

    def predict_margin(self, X: np.ndarray) -> np.ndarray:
        X = _check_features(X, self.feature_dim)
        margin = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            margin += self.learning_rate * _predict_tree(tree, X)
        return margin

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return expit(self.predict_margin(X))


def _check_features(X, feature_dim) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"feature array must be 2-D, got shape {X.shape}")
    if X.shape[1] != feature_dim:
        raise DataError(f"model expects {feature_dim} features, got {X.shape[1]}")
    return X


def _validate_training_inputs(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DataError("training set is empty")
    if y.shape != (X.shape[0],):
        raise DataError(f"labels shape {y.shape} does not match {X.shape[0]} frames")
    if not np.all(np.isfinite(X)):
        raise DataError("training features contain non-finite values")
    y = y.astype(np.int64)
    if set(np.unique(y)) - {0, 1}:
        raise DataError("labels must be 0 or 1")
    if y.min() == y.max():
        raise DataError("training set contains a single class")
    return X, y


def train_gbdt(X, y, params: GBDTParams | None = None) -> GBDTModel:
    """Boost num_trees regression trees on the weighted logistic loss."""
    params = params or GBDTParams()
    X, y = _validate_training_inputs(X, y)
    pos_weight = params.pos_weight
    if pos_weight is None:
        pos_weight = float(np.sum(y == 0)) / float(np.sum(y == 1))
    w = np.where(y == 1, pos_weight, 1.0)

    binner = _Binner.fit(X, params.max_bins)
    binned = binner.transform(X)

    p0 = float(np.sum(w * y) / np.sum(w))
    base_score = math.log(p0 / (1.0 - p0))
    margins = np.full(X.shape[0], base_score)
    losses = [_weighted_logloss(y, w, expit(margins))]

    trees = []
    for _ in range(params.num_trees):
        p = expit(margins)
        grad = w * (p - y)
        hess = w * p * (1.0 - p)
        tree, updates = _grow_tree(binned, grad, hess, params, binner)
        for idx, value in updates:
            margins[idx] += params.learning_rate * value
        trees.append(tree)
        losses.append(_weighted_logloss(y, w, expit(margins)))

    return GBDTModel(
        trees=trees,
        learning_rate=params.learning_rate,
        base_score=base_score,
        feature_dim=X.shape[1],
        params=params,
        train_logloss=losses,
    )


# ---------------------------------------------------------------------------
# Random forest


@dataclass(frozen=True)
class ForestParams:
    num_trees: int = 100
    seed: int = 0
    max_depth: int | None = None
    min_samples_leaf: int = 1
    max_features: str | int | None = "sqrt"
    bootstrap: bool = True
    max_bins: int = 255


@dataclass
class RandomForestModel:
    trees: list[TreeNode]
    feature_dim: int

    @property
    def num_trees(self) -> int:
        return len(self.trees)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Fraction of trees voting positive (leaf positive share > 1/2)."""
        X = _check_features(X, self.feature_dim)
        votes = np.zeros(X.shape[0])
        for tree in self.trees:
            votes += _predict_tree(tree, X) > 0.5
        return votes / len(self.trees)


def _num_candidate_features(max_features, d: int) -> int:
    if max_features is None:
        return d
    if max_features == "sqrt":
        return max(1, int(math.sqrt(d)))
    return max(1, min(int(max_features), d))


def _gini_best_split(pos_hist, cnt_hist, min_leaf):
    """Max weighted-gini-decrease (feature, bin); -inf when no valid split."""
    pl = np.cumsum(pos_hist, axis=1)
    cl = np.cumsum(cnt_hist, axis=1)
    pt, ct = pl[:, -1:], cl[:, -1:]
    pr, cr = pt - pl, ct - cl
    gini_l = cl - pl**2 / np.maximum(cl, 1) - (cl - pl) ** 2 / np.maximum(cl, 1)
    gini_r = cr - pr**2 / np.maximum(cr, 1) - (cr - pr) ** 2 / np.maximum(cr, 1)
    gini_t = ct - pt**2 / np.maximum(ct, 1) - (ct - pt) ** 2 / np.maximum(ct, 1)
    decrease = gini_t - gini_l - gini_r
    decrease[(cl < min_leaf) | (cr < min_leaf)] = -np.inf
    flat = int(np.argmax(decrease))
    feature, bin_index = divmod(flat, decrease.shape[1])
    return float(decrease[feature, bin_index]), feature, bin_index


def _grow_forest_tree(binned, y, sample_idx, params, binner, rng, d):
    root = TreeNode()
    stack = [(root, sample_idx, 0)]
    m = _num_candidate_features(params.max_features, d)
    while stack:
        node, idx, depth = stack.pop()
        pos = int(y[idx].sum())
        node.value = pos / idx.size
        pure = pos == 0 or pos == idx.size
        deep = params.max_depth is not None and depth >= params.max_depth
        if pure or deep or idx.size < 2 * params.min_samples_leaf:
            continue
        feats = np.sort(rng.choice(d, size=m, replace=False)) if m < d else np.arange(d)
        split = _node_gini_split(binned, y, idx, feats, params.min_samples_leaf, binner)
        if split is None and m < d:
            # the sampled subset was uninformative; retry with every feature
            split = _node_gini_split(binned, y, idx, np.arange(d), params.min_samples_leaf, binner)
        if split is None:
            continue
        feature, bin_index = split
        node.feature_index = feature
        node.threshold = binner.threshold_for(feature, bin_index)
        mask = binned[idx, feature] <= bin_index
        node.left, node.right = TreeNode(), TreeNode()
        stack.append((node.right, idx[~mask], depth + 1))
        stack.append((node.left, idx[mask], depth + 1))
    return root


def _node_gini_split(binned, y, idx, feats, min_leaf, binner):
    nb = binner.num_bins
    pos_hist = np.empty((feats.size, nb))
    cnt_hist = np.empty((feats.size, nb))
    yy = y[idx].astype(np.float64)
    for j, f in enumerate(feats):
        col = binned[idx, f]
        pos_hist[j] = np.bincount(col, weights=yy, minlength=nb)
        cnt_hist[j] = np.bincount(col, minlength=nb)
    decrease, j, bin_index = _gini_best_split(pos_hist, cnt_hist, min_leaf)
    if not np.isfinite(decrease) or decrease < 0:
        return None
    return int(feats[j]), bin_index


def train_random_forest(X, y, params: ForestParams | None = None) -> RandomForestModel:
    """Bootstrap-aggregated gini trees with sqrt(d) feature candidates."""
    params = params or ForestParams()
    X, y = _validate_training_inputs(X, y)
    n, d = X.shape
    binner = _Binner.fit(X, params.max_bins)
    binned = binner.transform(X)
    rng = np.random.default_rng(params.seed)
    trees = []
    for _ in range(params.num_trees):
        idx = rng.integers(0, n, size=n) if params.bootstrap else np.arange(n)
        trees.append(_grow_forest_tree(binned, y, idx, params, binner, rng, d))
    return RandomForestModel(trees=trees, feature_dim=d)


# ---------------------------------------------------------------------------
# Aggregation and fusion


def predict_frames(model, m: FeatureMatrix) -> np.ndarray:
    """Per-frame positive-class probabilities."""
    return model.predict_proba(m.data)


def score_recording(frame_probs, recording_id: str = "") -> RecordingScore:
    """Recording score = arithmetic mean of its frame probabilities."""
    probs = np.asarray(frame_probs, dtype=np.float64)
    if probs.size == 0:
        raise DataError(f"recording {recording_id!r} produced zero frames")
    return RecordingScore(
        recording_id=recording_id, score=float(probs.mean()), num_frames=probs.size
    )


def fuse_scores(systems: list[dict[str, float]], weights=None) -> dict[str, float]:
    """Weighted per-recording mean over systems (equal weights by default)."""
    if not systems:
        raise DataError("no score maps to fuse")
    ids = set(systems[0])
    for i, s in enumerate(systems[1:], start=2):
        if set(s) != ids:
            missing = ids.symmetric_difference(s)
            raise DataError(
                f"system {i} covers a different recording set "
                f"(e.g. {sorted(missing)[:3]})"
            )
    if weights is None:
        weights = [1.0] * len(systems)
    weights = [float(w) for w in weights]
    if len(weights) != len(systems):
        raise DataError(f"{len(weights)} weights for {len(systems)} systems")
    if any(w < 0 for w in weights) or sum(weights) == 0:
        raise DataError("weights must be non-negative and not all zero")
    total = sum(weights)
    return {
        rid: sum(w * s[rid] for w, s in zip(weights, systems)) / total for rid in sorted(ids)
    }


def stack_frames(items) -> tuple[np.ndarray, np.ndarray]:
    """Stack (FeatureMatrix, label) pairs into frame-level X, y arrays."""
    mats, labels = [], []
    dim = None
    for m, label in items:
        if dim is None:
            dim = m.num_coeffs
        elif m.num_coeffs != dim:
            raise DataError(
                f"feature dimension mismatch: {m.recording_id!r} has "
                f"{m.num_coeffs} columns, expected {dim}"
            )
        mats.append(m.data)
        labels.append(np.full(m.num_frames, int(label), dtype=np.int64))
    if not mats:
        raise DataError("no recordings to stack")
    return np.vstack(mats), np.concatenate(labels)


# ---------------------------------------------------------------------------
# Hyper-parameter search


def sample_params(space: dict, rng, defaults: GBDTParams | None = None) -> GBDTParams:
    """Draw one GBDTParams from a search space.

    Space values are either a list of choices, or a tag tuple:
    ("uniform", lo, hi), ("loguniform", lo, hi), ("randint", lo, hi).
    """
    defaults = defaults or GBDTParams()
    draw = {}
    for name, choices in space.items():
        if isinstance(choices, (list, np.ndarray)):
            value = choices[int(rng.integers(0, len(choices)))]
        elif isinstance(choices, tuple) and choices and choices[0] == "uniform":
            value = float(rng.uniform(choices[1], choices[2]))
        elif isinstance(choices, tuple) and choices and choices[0] == "loguniform":
            value = float(np.exp(rng.uniform(np.log(choices[1]), np.log(choices[2]))))
        elif isinstance(choices, tuple) and choices and choices[0] == "randint":
            value = int(rng.integers(choices[1], choices[2] + 1))
        else:
            raise DataError(f"search space entry {name!r} is not a list or range tag")
        if isinstance(value, (np.integer, np.floating)):
            value = value.item()
        draw[name] = value
    return defaults.replace(**draw)


DEFAULT_SEARCH_SPACE = {
    "learning_rate": ("loguniform", 0.02, 0.3),
    "max_leaves": [7, 15, 31, 63],
    "min_samples_leaf": [5, 10, 20, 50],
}


def hyperparameter_search(
    space: dict,
    features: dict[str, FeatureMatrix],
    labels: dict[str, int],
    folds,
    budget: int,
    seed: int = 0,
):
    """Seeded random search scored by mean validation AUC over the folds.

    Returns (best_params, trials) where trials is a list of dicts with the
    sampled parameters and their CV results, in evaluation order.
    """
    from .evaluation import cross_validate  # deferred: evaluation imports this module

    if budget < 1:
        raise DataError(f"search budget must be >= 1, got {budget}")
    if not space:
        raise DataError("search space is empty")
    rng = np.random.default_rng(seed)
    trials = []
    best = None
    for trial_index in range(budget):
        params = sample_params(space, rng)
        result = cross_validate(features, labels, folds, params=params)
        mean_auc = result.report.fold_auc_mean
        trials.append(
            {
                "trial": trial_index,
                "params": params,
                "mean_auc": mean_auc,
                "fold_aucs": result.report.per_fold_auc,
            }
        )
        if best is None or mean_auc > trials[best]["mean_auc"]:
            best = trial_index
    return trials[best]["params"], trials


# ---------------------------------------------------------------------------
# Serialization: versioned plain text, 17 significant digits


def _write_nodes(fh, node: TreeNode) -> None:
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.is_leaf:
            fh.write(f"L {cur.value:.17g}\n")
        else:
            fh.write(f"S {cur.feature_index} {cur.threshold:.17g}\n")
            stack.append(cur.right)
            stack.append(cur.left)


def _read_tree(lines) -> TreeNode:
    def node_from(line: str) -> tuple[TreeNode, bool]:
        parts = line.split()
        if parts[0] == "L" and len(parts) == 2:
            return TreeNode(value=float(parts[1])), False
        if parts[0] == "S" and len(parts) == 3:
            return TreeNode(feature_index=int(parts[1]), threshold=float(parts[2])), True
        raise DataError(f"bad model node line: {line!r}")

    root, is_split = node_from(next(lines))
    if not is_split:
        return root
    pending = [[root, 0]]
    while pending:
        node, is_split = node_from(next(lines))
        parent = pending[-1]
        if parent[1] == 0:
            parent[0].left = node
            parent[1] = 1
        else:
            parent[0].right = node
            pending.pop()
        if is_split:
            pending.append([node, 0])
    return root


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if isinstance(model, GBDTModel):
            fh.write(
                f"GBDT v1 dim={model.feature_dim} trees={model.num_trees} "
                f"lr={model.learning_rate:.17g} base={model.base_score:.17g}\n"
            )
        elif isinstance(model, RandomForestModel):
            fh.write(f"RF v1 dim={model.feature_dim} trees={model.num_trees}\n")
        else:
            raise DataError(f"cannot serialize model of type {type(model).__name__}")
        for tree in model.trees:
            _write_nodes(fh, tree)


def load_model(path):
    path = str(path)
    try:
        with open(path, encoding="utf-8") as fh:
            lines = iter([ln for ln in fh.read().splitlines() if ln.strip()])
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from exc
    header = next(lines, None)
    if header is None:
        raise DataError(f"{path}: empty model file")
    parts = header.split()
    try:
        kind, version = parts[0], parts[1]
        fields_kv = dict(p.split("=", 1) for p in parts[2:])
        dim = int(fields_kv["dim"])
        num_trees = int(fields_kv["trees"])
    except (IndexError, KeyError, ValueError) as exc:
        raise DataError(f"{path}: bad model header {header!r}") from exc
    if version != "v1":
        raise DataError(f"{path}: unsupported model version {version!r}")
    try:
        trees = [_read_tree(lines) for _ in range(num_trees)]
    except StopIteration:
        raise DataError(f"{path}: truncated model file") from None
    if kind == "GBDT":
        return GBDTModel(
            trees=trees,
            learning_rate=float(fields_kv["lr"]),
            base_score=float(fields_kv["base"]),
            feature_dim=dim,
            params=GBDTParams(num_trees=num_trees),
        )
    if kind == "RF":
        return RandomForestModel(trees=trees, feature_dim=dim)
    raise DataError(f"{path}: unknown model kind {kind!r}")


def save_scores(scores: dict[str, float], path) -> None:
    """CSV id,score with full-precision values (byte-stable for fixed input)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("id,score\n")
        for rid in sorted(scores):
            fh.write(f"{rid},{scores[rid]:.17g}\n")


def load_scores(path) -> dict[str, float]:
    import csv

    path = str(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if not reader.fieldnames or {"id", "score"} - set(reader.fieldnames):
                raise DataError(f"{path}: scores file needs columns id,score")
            scores = {}
            for lineno, row in enumerate(reader, start=2):
                rid = row["id"].strip()
                if rid in scores:
                    raise DataError(f"{path}: line {lineno}: duplicate id {rid!r}")
                try:
                    scores[rid] = float(row["score"])
                except ValueError as exc:
                    raise DataError(
                        f"{path}: line {lineno}: score {row['score']!r} is not a number"
                    ) from exc
    except OSError as exc:
        raise DataError(f"cannot read scores {path}: {exc}") from exc
    if not scores:
        raise DataError(f"{path}: empty scores file")
    return scores
