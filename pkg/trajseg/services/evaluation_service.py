"""
Evaluation Service
==================
Purity/coverage scoring and the k-fold tune/test protocol.

SCORING:
For each computed segment s
- purity(s)   = count of the modal ground-truth label in s / |s|
- g*(s)       = ground-truth segment sharing the most points with s
                (earlier segment on ties)
- coverage(s) = |s ∩ g*(s)| / |g*(s)|
Trajectory purity and coverage are point-weighted means over computed
segments; the headline number is their harmonic mean.

PROTOCOL:
Objects (not trajectories) are shuffled with a seed and dealt into k
folds, so all trajectories of one object share a fold. Fold 0 tunes or
trains; folds 1..k-1 are tested, each trajectory segmented on its own and
the per-trajectory harmonic means averaged per fold.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from trajseg.config import derive_seed
from trajseg.errors import MissingLabelsError, NotEnoughObjectsError, ValidationError
from trajseg.models.trajectory import SegmentationResult, SegmentScore, Trajectory
from trajseg.services.stats_service import mann_whitney_u
from trajseg.services.training_service import splits_from_labels

logger = logging.getLogger(__name__)

TUNING_FOLD = 0


def score(result: SegmentationResult, truth: Trajectory) -> SegmentScore:
    """
    Score a segmentation against the labeled trajectory it was computed on.

    Args:
        result: Computed segmentation
        truth: Same trajectory, with labels

    Returns:
        SegmentScore(purity, coverage, harmonic)

    Raises:
        MissingLabelsError: truth has no labels
        ValidationError: result and truth disagree on point count
    """
    if not truth.is_labeled:
        raise MissingLabelsError(f"Cannot score {truth.id}: no ground-truth labels")
    n = len(truth)
    if result.n_points != n:
        raise ValidationError(f"Result covers {result.n_points} points but {truth.id} has {n}")
    if n == 0:
        raise ValidationError(f"Cannot score empty trajectory {truth.id}")

    truth_segments = SegmentationResult.from_splits(truth.id, n, splits_from_labels(truth).split_indices).segments
    truth_lengths = np.array([end - start + 1 for start, end in truth_segments])
    truth_of_point = np.repeat(np.arange(len(truth_segments)), truth_lengths)
    labels = truth.labels

    purity_total = 0.0
    coverage_total = 0.0
    for start, end in result.segments:
        size = end - start + 1
        modal_count = Counter(labels[start:end + 1]).most_common(1)[0][1]
        overlaps = np.bincount(truth_of_point[start:end + 1], minlength=len(truth_segments))
        best = int(np.argmax(overlaps))
        purity_total += modal_count
        coverage_total += size * overlaps[best] / truth_lengths[best]

    return SegmentScore.from_purity_coverage(purity_total / n, float(coverage_total / n))


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: Dict[str, int]
    tuning_fold: int = TUNING_FOLD

    def members(self, trajectories: Sequence[Trajectory]) -> List[List[Trajectory]]:
        """Trajectories of each fold, sorted by id within a fold."""
        folds: List[List[Trajectory]] = [[] for _ in range(self.k)]
        for traj in sorted(trajectories, key=lambda t: t.id):
            folds[self.assignment[traj.id]].append(traj)
        return folds


def make_fold_plan(trajectories: Sequence[Trajectory], k: int = 10, seed: int = 42) -> FoldPlan:
    """
    Deal moving objects into k folds after a seeded shuffle.

    Raises:
        ValidationError: k < 2
        NotEnoughObjectsError: fewer objects than folds
    """
    if k < 2:
        raise ValidationError(f"Need at least 2 folds, got {k}")
    objects = sorted({traj.object_id for traj in trajectories})
    if len(objects) < k:
        raise NotEnoughObjectsError(f"{len(objects)} moving objects cannot fill {k} folds")
    rng = np.random.default_rng(derive_seed(seed, "folds"))
    order = rng.permutation(len(objects))
    object_fold = {objects[idx]: position % k for position, idx in enumerate(order)}
    return FoldPlan(k, {traj.id: object_fold[traj.object_id] for traj in trajectories})


@dataclass(frozen=True)
class FoldReport:
    algorithm: str
    folds: Tuple[int, ...]
    fold_means: Tuple[float, ...]
    mean: float
    std: float
    parameters: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class PairwiseTest:
    a: str
    b: str
    u: float
    p_value: float


@dataclass(frozen=True)
class ComparisonReport:
    k: int
    seed: int
    plan: FoldPlan
    reports: Tuple[FoldReport, ...]
    pairwise: Tuple[PairwiseTest, ...] = ()


def _aggregate(values: Sequence[float]) -> Tuple[float, float]:
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return mean, std


def run_folds(dataset: Sequence[Trajectory], algorithm, plan: FoldPlan, seed: int) -> FoldReport:
    """Tune on the plan's tuning fold, test on the others."""
    folds = plan.members(dataset)
    logger.info(f"🔧 Tuning {algorithm.name} on {len(folds[plan.tuning_fold])} trajectories")
    tuned = algorithm.tune(folds[plan.tuning_fold], seed)

    fold_ids, fold_means = [], []
    for fold_id, members in enumerate(folds):
        if fold_id == plan.tuning_fold:
            continue
        fold_ids.append(fold_id)
        harmonics = [score(tuned.segment(traj), traj).harmonic for traj in members]
        fold_means.append(float(np.mean(harmonics)))
        logger.debug(f"{algorithm.name} fold {fold_id}: H={fold_means[-1]:.4f}")

    mean, std = _aggregate(fold_means)
    logger.info(f"📊 {algorithm.name}: mean H={mean:.4f} (std {std:.4f}) over {len(fold_means)} folds")
    return FoldReport(algorithm.name, tuple(fold_ids), tuple(fold_means), mean, std, tuned.parameters)


def kfold_protocol(dataset: Sequence[Trajectory], algorithm, k: int = 10, seed: int = 42) -> FoldReport:
    """
    Evaluate one algorithm with the k-fold tune/test protocol.

    Args:
        dataset: Labeled trajectories
        algorithm: SegmentationAlgorithm (see algorithm_service)
        k: Number of folds (>= 2)
        seed: Run seed

    Returns:
        FoldReport with k-1 fold means plus mean/std
    """
    return run_folds(dataset, algorithm, make_fold_plan(dataset, k, seed), seed)


def compare(dataset: Sequence[Trajectory], algorithms: Sequence, k: int = 10, seed: int = 42) -> ComparisonReport:
    """
    Run every algorithm on the same folds and test each pair of fold-mean samples.

    Pairs follow the order the algorithms were given.
    """
    plan = make_fold_plan(dataset, k, seed)
    reports = tuple(run_folds(dataset, algorithm, plan, seed) for algorithm in algorithms)
    pairwise = []
    for i in range(len(reports)):
        for j in range(i + 1, len(reports)):
            test = mann_whitney_u(reports[i].fold_means, reports[j].fold_means)
            pairwise.append(PairwiseTest(reports[i].algorithm, reports[j].algorithm, test.u, test.p_value))
    return ComparisonReport(k, seed, plan, reports, tuple(pairwise))
