"""
Random forest model types.

Trees are stored as flat parallel arrays (node 0 is the root). A node is
either
- Internal: feature >= 0, threshold in meters, left/right child ids;
  samples with x[feature] <= threshold go left.
- Leaf: feature == -1, value = fraction of positive training samples that
  reached it, n_samples = how many did.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from trajseg.errors import ValidationError
from trajseg.models.trajectory import KernelKind

LEAF = -1


class ForestParams(BaseModel):
    """Forest hyperparameters. No published values exist, so these follow common RF practice."""

    model_config = ConfigDict(frozen=True)

    n_trees: int = Field(100, ge=1)
    max_depth: Optional[int] = Field(12, ge=1)  # None = unbounded
    min_samples_leaf: int = Field(2, ge=1)
    features_per_split: Optional[int] = Field(None, ge=1)  # None = ceil(sqrt(q))
    bootstrap: bool = True
    balanced: bool = True
    threshold: float = Field(0.5, ge=0.0, le=1.0)

    def resolved_features_per_split(self, q: int) -> int:
        fps = self.features_per_split if self.features_per_split is not None else math.ceil(math.sqrt(q))
        if fps > q:
            raise ValidationError(f"features_per_split={fps} exceeds feature length q={q}")
        return fps


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @classmethod
    def leaf(cls, positive_fraction: float, sample_count: int = 1) -> "Tree":
        """Single-leaf tree."""
        if not 0.0 <= positive_fraction <= 1.0:
            raise ValidationError(f"positive_fraction {positive_fraction} outside [0, 1]")
        return cls(
            feature=np.array([LEAF], dtype=np.int64),
            threshold=np.array([0.0]),
            left=np.array([LEAF], dtype=np.int64),
            right=np.array([LEAF], dtype=np.int64),
            value=np.array([float(positive_fraction)]),
            n_samples=np.array([int(sample_count)], dtype=np.int64),
        )

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def depth(self) -> int:
        deepest = 0
        stack = [(0, 0)]
        while stack:
            node, d = stack.pop()
            deepest = max(deepest, d)
            if self.feature[node] != LEAF:
                stack.append((int(self.left[node]), d + 1))
                stack.append((int(self.right[node]), d + 1))
        return deepest

    def apply(self, matrix: np.ndarray) -> np.ndarray:
        """Leaf value reached by every row of matrix."""
        nodes = np.zeros(len(matrix), dtype=np.int64)
        while True:
            features = self.feature[nodes]
            active = np.nonzero(features != LEAF)[0]
            if active.size == 0:
                break
            current = nodes[active]
            go_left = matrix[active, features[active]] <= self.threshold[current]
            nodes[active] = np.where(go_left, self.left[current], self.right[current])
        return self.value[nodes]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, name), getattr(other, name))
            for name in ("feature", "threshold", "left", "right", "value", "n_samples")
        )


@dataclass(frozen=True, eq=False)
class ForestModel:
    """
    Trained forest mapping q error values to split / no-split.

    w and kernel record how the training error signal was produced so
    inference can reuse them. feature_stats holds (mean, std) when the
    training set was standardised.
    """

    trees: Tuple[Tree, ...]
    q: int
    params: ForestParams
    seed: int
    w: Optional[int] = None
    kernel: Optional[KernelKind] = None
    feature_stats: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        object.__setattr__(self, "trees", tuple(self.trees))
        if len(self.trees) != self.params.n_trees:
            raise ValidationError(f"Forest has {len(self.trees)} trees, expected {self.params.n_trees}")

    @property
    def threshold(self) -> float:
        return self.params.threshold

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ForestModel):
            return NotImplemented
        return (
            self.q == other.q
            and self.params == other.params
            and self.seed == other.seed
            and self.w == other.w
            and self.kernel == other.kernel
            and self.feature_stats == other.feature_stats
            and len(self.trees) == len(other.trees)
            and all(a == b for a, b in zip(self.trees, other.trees))
        )
