"""
Algorithm Service
=================
Common interface over every segmenter the evaluation protocol can run.

An algorithm is tuned (or trained) on one labeled fold and returns a
TunedSegmenter: a callable-like object that segments single trajectories
and reports the parameters it settled on.

REGISTRY:
- wsii:   trains a forest on the tuning fold
- ows:    grid-searches epsilon (RandomWalk kernel unless told otherwise)
- spd:    grid-searches theta_d x theta_t
- cbsmot: grid-searches eps x min_time
Test helpers (oracle, single) are not part of the registry.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence

from trajseg.config import DEFAULT_KERNEL, DEFAULT_Q, DEFAULT_WINDOW, derive_seed
from trajseg.errors import ValidationError
from trajseg.models.forest import ForestParams
from trajseg.models.trajectory import KernelKind, SegmentationResult, Trajectory
from trajseg.services.baseline_service import (
    cbsmot_segment,
    ows_segment,
    ows_tune,
    spd_segment,
    tune_cbsmot,
    tune_spd,
)
from trajseg.services.segmenter_service import segment, train_model
from trajseg.services.training_service import splits_from_labels

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TunedSegmenter:
    segment_fn: Callable[[Trajectory], SegmentationResult]
    parameters: Dict[str, Any] = field(default_factory=dict)

    def segment(self, traj: Trajectory) -> SegmentationResult:
        return self.segment_fn(traj)


class SegmentationAlgorithm(ABC):
    """Abstract base class for segmenters evaluated by the fold protocol."""

    name: str = ""

    @abstractmethod
    def tune(self, trajectories: Sequence[Trajectory], seed: int) -> TunedSegmenter:
        """
        Fit parameters on a labeled tuning fold.

        Args:
            trajectories: Labeled trajectories of the tuning fold
            seed: Run seed; implementations derive their own sub-seeds

        Returns:
            TunedSegmenter ready for the test folds
        """
        pass


class WsiiAlgorithm(SegmentationAlgorithm):
    name = "wsii"

    def __init__(
        self,
        w: int = DEFAULT_WINDOW,
        q: int = DEFAULT_Q,
        kernel: KernelKind = DEFAULT_KERNEL,
        hp: Optional[ForestParams] = None,
        standardize: bool = False,
        n_jobs: int = 1,
    ):
        self.w = w
        self.q = q
        self.kernel = KernelKind.parse(kernel)
        self.hp = hp or ForestParams()
        self.standardize = standardize
        self.n_jobs = n_jobs

    def tune(self, trajectories: Sequence[Trajectory], seed: int) -> TunedSegmenter:
        model = train_model(
            trajectories,
            self.w,
            self.q,
            self.kernel,
            hp=self.hp,
            seed=derive_seed(seed, "forest"),
            standardize=self.standardize,
            n_jobs=self.n_jobs,
        )
        parameters = {
            "w": self.w,
            "q": self.q,
            "kernel": self.kernel.value,
            "forest_seed": model.seed,
            **self.hp.model_dump(mode="json"),
        }
        return TunedSegmenter(lambda traj: segment(traj, model, self.w, self.q, self.kernel), parameters)


class OwsAlgorithm(SegmentationAlgorithm):
    name = "ows"

    def __init__(self, w: int = DEFAULT_WINDOW, kernels: Sequence[KernelKind] = (KernelKind.RANDOM_WALK,)):
        self.w = w
        self.kernels = tuple(KernelKind.parse(k) for k in kernels)

    def tune(self, trajectories: Sequence[Trajectory], seed: int) -> TunedSegmenter:
        params = ows_tune(trajectories, w=self.w, kernels=self.kernels)
        return TunedSegmenter(lambda traj: ows_segment(traj, params), params.model_dump(mode="json"))


class SpdAlgorithm(SegmentationAlgorithm):
    name = "spd"

    def __init__(self, grid: Optional[Dict[str, Sequence[float]]] = None):
        self.grid = grid

    def tune(self, trajectories: Sequence[Trajectory], seed: int) -> TunedSegmenter:
        params = tune_spd(trajectories, self.grid)
        return TunedSegmenter(lambda traj: spd_segment(traj, params), params.model_dump(mode="json"))


class CbSmotAlgorithm(SegmentationAlgorithm):
    name = "cbsmot"

    def __init__(self, grid: Optional[Dict[str, Sequence[float]]] = None):
        self.grid = grid

    def tune(self, trajectories: Sequence[Trajectory], seed: int) -> TunedSegmenter:
        params = tune_cbsmot(trajectories, self.grid)
        return TunedSegmenter(lambda traj: cbsmot_segment(traj, params), params.model_dump(mode="json"))


class OracleAlgorithm(SegmentationAlgorithm):
    """Returns the ground-truth segmentation of labeled trajectories."""

    name = "oracle"

    def tune(self, trajectories: Sequence[Trajectory], seed: int) -> TunedSegmenter:
        return TunedSegmenter(
            lambda traj: SegmentationResult.from_splits(traj.id, len(traj), splits_from_labels(traj).split_indices)
        )


class SingleSegmentAlgorithm(SegmentationAlgorithm):
    """Never splits."""

    name = "single"

    def tune(self, trajectories: Sequence[Trajectory], seed: int) -> TunedSegmenter:
        return TunedSegmenter(lambda traj: SegmentationResult.from_splits(traj.id, len(traj), ()))


ALGORITHMS = {
    "wsii": WsiiAlgorithm,
    "ows": OwsAlgorithm,
    "spd": SpdAlgorithm,
    "cbsmot": CbSmotAlgorithm,
}


def build_algorithm(name: str, **options) -> SegmentationAlgorithm:
    """
    Instantiate a registered algorithm.

    Options not accepted by the algorithm are ignored, so one option dict
    (w, q, kernel, hp, ...) can be shared across a comparison.
    """
    try:
        cls = ALGORITHMS[name]
    except KeyError:
        raise ValidationError(f"Unknown algorithm '{name}' (expected one of: {', '.join(ALGORITHMS)})")
    if cls is WsiiAlgorithm:
        accepted = ("w", "q", "kernel", "hp", "standardize", "n_jobs")
    elif cls is OwsAlgorithm:
        accepted = ("w", "kernels")
    else:
        accepted = ("grid",)
    return cls(**{key: value for key, value in options.items() if key in accepted and value is not None})
