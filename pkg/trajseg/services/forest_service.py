"""
Forest Service
==============
From-scratch binary random forest over fixed-length error windows.

- CART trees grown with Gini impurity
- features_per_split candidate features sampled per node, without replacement
- balanced bootstrap by default: split windows are rare, and unbalanced
  bagging tends to collapse into an always-0 model
- tree i uses its own generator seeded with seed + i, so the forest does
  not depend on the order in which trees are trained

Ties between candidate splits go to the lowest feature index, then the
lowest threshold.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from trajseg.errors import EmptyInputError, ModelMismatchError
from trajseg.models.forest import LEAF, ForestModel, ForestParams, Tree
from trajseg.models.trajectory import TrainingSample

logger = logging.getLogger(__name__)

_TIE_TOLERANCE = 1e-12


def _gini(positives: np.ndarray, counts: np.ndarray) -> np.ndarray:
    p = positives / counts
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def _best_split(
    matrix: np.ndarray,
    labels: np.ndarray,
    features: np.ndarray,
    min_samples_leaf: int,
) -> Optional[Tuple[int, float, float]]:
    """
    Lowest weighted Gini split over the candidate features.

    Returns:
        (feature, threshold, weighted impurity) or None when no split keeps
        min_samples_leaf samples on both sides
    """
    n = len(labels)
    total_pos = labels.sum()
    best = None
    for feature in features:
        column = matrix[:, feature]
        order = np.argsort(column, kind="mergesort")
        xs = column[order]
        cum_pos = np.cumsum(labels[order])

        cut = np.nonzero(xs[:-1] < xs[1:])[0]
        n_left = cut + 1
        cut = cut[(n_left >= min_samples_leaf) & (n - n_left >= min_samples_leaf)]
        if cut.size == 0:
            continue

        n_left = (cut + 1).astype(float)
        n_right = n - n_left
        pos_left = cum_pos[cut].astype(float)
        pos_right = total_pos - pos_left
        weighted = (n_left * _gini(pos_left, n_left) + n_right * _gini(pos_right, n_right)) / n

        k = int(np.nonzero(weighted <= weighted.min() + _TIE_TOLERANCE)[0][0])
        impurity = float(weighted[k])
        lo, hi = xs[cut[k]], xs[cut[k] + 1]
        threshold = lo + (hi - lo) / 2.0
        if threshold >= hi:
            threshold = lo
        if best is None or impurity < best[2] - _TIE_TOLERANCE:
            best = (int(feature), float(threshold), impurity)
    return best


def _bootstrap_rows(labels: np.ndarray, params: ForestParams, rng: np.random.Generator) -> np.ndarray:
    n = len(labels)
    if not params.bootstrap:
        return np.arange(n)
    if params.balanced:
        half = math.ceil(n / 2)
        negatives = np.nonzero(labels == 0)[0]
        positives = np.nonzero(labels == 1)[0]
        return np.concatenate([
            rng.choice(negatives, size=half, replace=True),
            rng.choice(positives, size=half, replace=True),
        ])
    return rng.integers(0, n, size=n)


def _grow_tree(matrix: np.ndarray, labels: np.ndarray, params: ForestParams, tree_seed: int) -> Tree:
    rng = np.random.default_rng(tree_seed)
    q = matrix.shape[1]
    fps = params.resolved_features_per_split(q)
    rows = _bootstrap_rows(labels, params, rng)

    feature, threshold, left, right, value, n_samples = [], [], [], [], [], []

    def build(node_rows: np.ndarray, depth: int) -> int:
        node_id = len(feature)
        node_labels = labels[node_rows]
        count = len(node_labels)
        positives = int(node_labels.sum())
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(positives / count)
        n_samples.append(count)

        if (params.max_depth is not None and depth >= params.max_depth) \
                or positives in (0, count) \
                or count < 2 * params.min_samples_leaf:
            return node_id

        candidates = np.sort(rng.choice(q, size=fps, replace=False))
        split = _best_split(matrix[node_rows], node_labels, candidates, params.min_samples_leaf)
        if split is None:
            return node_id

        split_feature, split_threshold, impurity = split
        parent = float(_gini(np.array([positives]), np.array([count]))[0])
        assert impurity <= parent + _TIE_TOLERANCE, "Gini split increased weighted impurity"

        goes_left = matrix[node_rows, split_feature] <= split_threshold
        feature[node_id] = split_feature
        threshold[node_id] = split_threshold
        left[node_id] = build(node_rows[goes_left], depth + 1)
        right[node_id] = build(node_rows[~goes_left], depth + 1)
        return node_id

    build(rows, 0)
    return Tree(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=float),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=float),
        n_samples=np.array(n_samples, dtype=np.int64),
    )


def samples_to_arrays(samples: Sequence[TrainingSample]) -> Tuple[np.ndarray, np.ndarray]:
    matrix = np.array([s.features for s in samples], dtype=float)
    labels = np.array([s.label for s in samples], dtype=np.int64)
    return matrix, labels


def fit(
    samples: Sequence[TrainingSample],
    hp: Optional[ForestParams] = None,
    seed: int = 42,
    n_jobs: int = 1,
) -> ForestModel:
    """
    Train a forest on error-window samples.

    Args:
        samples: Training samples (all the same feature length)
        hp: Hyperparameters (defaults when None)
        seed: Base seed; tree i uses seed + i
        n_jobs: Trees trained concurrently (joblib); results do not depend on it

    Returns:
        Trained ForestModel. A single-class training set yields a constant
        model and a warning.

    Raises:
        EmptyInputError: no samples
    """
    hp = hp or ForestParams()
    if not samples:
        raise EmptyInputError("Cannot fit a forest on an empty training set")

    matrix, labels = samples_to_arrays(samples)
    q = matrix.shape[1]
    hp.resolved_features_per_split(q)

    classes = np.unique(labels)
    if classes.size == 1:
        constant = float(classes[0])
        logger.warning(
            f"⚠️ DEGENERATE MODEL: all {len(labels)} training samples have label {int(constant)}; "
            f"every prediction will be {int(constant)}"
        )
        trees = tuple(Tree.leaf(constant, len(labels)) for _ in range(hp.n_trees))
        return ForestModel(trees=trees, q=q, params=hp, seed=seed)

    logger.info(
        f"🌲 Training {hp.n_trees} trees on {len(labels)} samples "
        f"({int(labels.sum())} positive, q={q}, seed={seed})"
    )
    trees = Parallel(n_jobs=n_jobs)(
        delayed(_grow_tree)(matrix, labels, hp, seed + i) for i in range(hp.n_trees)
    )
    return ForestModel(trees=tuple(trees), q=q, params=hp, seed=seed)


def _prepare(model: ForestModel, matrix: np.ndarray) -> np.ndarray:
    if matrix.ndim != 2 or matrix.shape[1] != model.q:
        width = matrix.shape[-1] if matrix.ndim else 0
        raise ModelMismatchError(f"Model expects {model.q} features, got {width}")
    if model.feature_stats is not None:
        mean, std = model.feature_stats
        matrix = (matrix - mean) / std
    return matrix


def predict_proba_batch(model: ForestModel, matrix) -> np.ndarray:
    """Mean leaf positive fraction across trees, one value per row."""
    matrix = _prepare(model, np.asarray(matrix, dtype=float))
    total = np.zeros(len(matrix))
    for tree in model.trees:
        total += tree.apply(matrix)
    return total / len(model.trees)


def predict_proba(model: ForestModel, features: Sequence[float]) -> float:
    """
    Probability that a window holds a partitioning position.

    Raises:
        ModelMismatchError: if len(features) != model.q
    """
    row = np.asarray(features, dtype=float).reshape(1, -1)
    return float(predict_proba_batch(model, row)[0])


def predict(model: ForestModel, features: Sequence[float]) -> int:
    """1 iff predict_proba >= model.threshold."""
    return int(predict_proba(model, features) >= model.threshold)


def predict_batch(model: ForestModel, matrix) -> np.ndarray:
    return (predict_proba_batch(model, matrix) >= model.threshold).astype(np.int64)
