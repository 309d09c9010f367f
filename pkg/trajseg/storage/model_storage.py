"""
Model Storage
=============
Forest models as self-describing JSON.

Layout:
    {
      "schema": "trajseg.forest",
      "version": 1,
      "q": 7, "seed": ..., "w": 7, "kernel": "random-walk",
      "feature_stats": null | [mean, std],
      "params": {...ForestParams...},
      "trees": [{"feature": [...], "threshold": [...], "left": [...],
                 "right": [...], "value": [...], "n_samples": [...]}, ...]
    }

Files with another schema name or version are rejected before any other
field is read.
"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ValidationError as PydanticValidationError, model_validator

from trajseg.errors import SchemaVersionError, ValidationError
from trajseg.models.forest import LEAF, ForestModel, ForestParams, Tree
from trajseg.models.trajectory import KernelKind

logger = logging.getLogger(__name__)

SCHEMA_NAME = "trajseg.forest"
SCHEMA_VERSION = 1


class TreeRecord(BaseModel):
    feature: List[int]
    threshold: List[float]
    left: List[int]
    right: List[int]
    value: List[float]
    n_samples: List[int]

    @model_validator(mode="after")
    def _consistent(self) -> "TreeRecord":
        n = len(self.feature)
        if n == 0:
            raise ValueError("tree has no nodes")
        arrays = (self.threshold, self.left, self.right, self.value, self.n_samples)
        if any(len(a) != n for a in arrays):
            raise ValueError("tree arrays differ in length")
        for node in range(n):
            if self.feature[node] == LEAF:
                continue
            if not (0 < self.left[node] < n and 0 < self.right[node] < n):
                raise ValueError(f"node {node} points outside the tree")
        if any(not 0.0 <= v <= 1.0 for v in self.value):
            raise ValueError("leaf values must lie in [0, 1]")
        return self

    @classmethod
    def from_tree(cls, tree: Tree) -> "TreeRecord":
        return cls(
            feature=tree.feature.tolist(),
            threshold=tree.threshold.tolist(),
            left=tree.left.tolist(),
            right=tree.right.tolist(),
            value=tree.value.tolist(),
            n_samples=tree.n_samples.tolist(),
        )

    def to_tree(self) -> Tree:
        return Tree(
            feature=np.array(self.feature, dtype=np.int64),
            threshold=np.array(self.threshold, dtype=float),
            left=np.array(self.left, dtype=np.int64),
            right=np.array(self.right, dtype=np.int64),
            value=np.array(self.value, dtype=float),
            n_samples=np.array(self.n_samples, dtype=np.int64),
        )


class ForestFile(BaseModel):
    schema_name: str = SCHEMA_NAME
    version: int = SCHEMA_VERSION
    q: int
    seed: int
    w: Optional[int] = None
    kernel: Optional[KernelKind] = None
    feature_stats: Optional[Tuple[float, float]] = None
    params: ForestParams
    trees: List[TreeRecord]

    @model_validator(mode="after")
    def _features_in_range(self) -> "ForestFile":
        for i, tree in enumerate(self.trees):
            if any(f != LEAF and not 0 <= f < self.q for f in tree.feature):
                raise ValueError(f"tree {i} splits on a feature outside [0, {self.q})")
        return self


def model_to_dict(model: ForestModel) -> dict:
    record = ForestFile(
        q=model.q,
        seed=model.seed,
        w=model.w,
        kernel=model.kernel,
        feature_stats=model.feature_stats,
        params=model.params,
        trees=[TreeRecord.from_tree(tree) for tree in model.trees],
    ).model_dump(mode="json")
    record["schema"] = record.pop("schema_name")
    return record


def model_from_dict(data: dict) -> ForestModel:
    """
    Rebuild a ForestModel from its JSON form.

    Raises:
        SchemaVersionError: unknown schema name or version
        ValidationError: malformed content
    """
    if not isinstance(data, dict):
        raise ValidationError("Model file must contain a JSON object")
    schema, version = data.get("schema"), data.get("version")
    if schema != SCHEMA_NAME or version != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"Unsupported model file schema {schema!r} version {version!r} "
            f"(expected {SCHEMA_NAME!r} version {SCHEMA_VERSION})"
        )
    payload = {key: value for key, value in data.items() if key != "schema"}
    try:
        record = ForestFile.model_validate(payload)
    except PydanticValidationError as e:
        raise ValidationError(f"Malformed model file: {e}")
    return ForestModel(
        trees=tuple(tree.to_tree() for tree in record.trees),
        q=record.q,
        params=record.params,
        seed=record.seed,
        w=record.w,
        kernel=record.kernel,
        feature_stats=record.feature_stats,
    )


def save_model(path: Union[str, Path], model: ForestModel) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), sort_keys=True, indent=1) + "\n")
    logger.info(f"💾 Saved {model.n_trees}-tree model to {path}")


def load_model(path: Union[str, Path]) -> ForestModel:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f"Model file {path} is not valid JSON: {e}")
    model = model_from_dict(data)
    logger.info(f"✅ Loaded {model.n_trees}-tree model (q={model.q}) from {path}")
    return model
