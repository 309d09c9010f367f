"""
Training Service
================
Turns labeled trajectories into classifier samples.

Each sample is a run of q consecutive error values. It is positive when
the point-index span covered by the run contains a partitioning position
(the last point of a ground-truth segment).

CONTAINMENT:
A run covering point indices [a, b] is positive iff a <= s <= b for some
split s. A single isolated split therefore produces exactly q positive
slides (fewer near the signal ends).
"""

import logging
import numbers
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from trajseg.errors import MissingLabelsError, ValidationError
from trajseg.models.trajectory import ErrorSignal, GroundTruthSplits, KernelKind, TrainingSample, Trajectory
from trajseg.services.error_signal_service import error_signal

logger = logging.getLogger(__name__)


def validate_q(q: int) -> int:
    if not isinstance(q, numbers.Integral) or isinstance(q, bool) or q < 3 or q % 2 == 0:
        raise ValidationError(f"Sample window q must be an odd integer >= 3, got {q!r}")
    return q


def splits_from_labels(traj: Trajectory) -> GroundTruthSplits:
    """
    Derive partitioning positions from per-point labels.

    Args:
        traj: Labeled trajectory

    Returns:
        Indices i where labels[i] != labels[i + 1]

    Raises:
        MissingLabelsError: if the trajectory carries no labels
    """
    if not traj.is_labeled:
        raise MissingLabelsError(f"Trajectory {traj.id} has no ground-truth labels")
    labels = traj.labels
    splits = tuple(i for i in range(len(labels) - 1) if labels[i] != labels[i + 1])
    return GroundTruthSplits(traj.id, splits)


def build_training_set(signal: ErrorSignal, splits: GroundTruthSplits, q: int) -> List[TrainingSample]:
    """
    Slide a q-window over an error signal and label every position.

    Args:
        signal: Error signal of one trajectory
        splits: Ground-truth partitioning positions of the same trajectory
        q: Sample length (odd, >= 3)

    Returns:
        One sample per q-run, in order of first covered point index.
        Signals shorter than q give an empty list (logged as a warning).
    """
    validate_q(q)
    if len(signal) < q:
        logger.warning(
            f"⚠️ No training samples for {signal.trajectory_id}: "
            f"signal has {len(signal)} values, fewer than q={q}"
        )
        return []

    split_array = np.asarray(sorted(splits.split_indices), dtype=int)
    indices = signal.indices
    values = signal.values
    samples = []
    for start in range(len(signal) - q + 1):
        first, last = indices[start], indices[start + q - 1]
        # any split s with first <= s <= last
        pos = np.searchsorted(split_array, first, side="left")
        label = int(pos < len(split_array) and split_array[pos] <= last)
        samples.append(TrainingSample(
            features=tuple(values[start:start + q]),
            label=label,
            origin=(signal.trajectory_id, first),
        ))
    return samples


def build_training_dataset(
    trajectories: Iterable[Trajectory],
    w: int,
    q: int,
    kernel: KernelKind,
) -> List[TrainingSample]:
    """
    Samples for every labeled trajectory, ordered by trajectory id then start index.
    """
    samples: List[TrainingSample] = []
    for traj in sorted(trajectories, key=lambda t: t.id):
        signal = error_signal(traj, w, kernel)
        samples.extend(build_training_set(signal, splits_from_labels(traj), q))
    positives = sum(s.label for s in samples)
    logger.info(f"Built {len(samples)} training samples ({positives} positive)")
    return samples


def standardize_samples(
    samples: Sequence[TrainingSample],
    stats: Optional[Tuple[float, float]] = None,
) -> Tuple[List[TrainingSample], Tuple[float, float]]:
    """
    Shift and scale every feature by one dataset-wide mean and std.

    Args:
        samples: Samples to transform
        stats: (mean, std) to reuse; computed from the samples when None

    Returns:
        (transformed samples, (mean, std))
    """
    if stats is None:
        if samples:
            flat = np.concatenate([np.asarray(s.features, dtype=float) for s in samples])
            mean, std = float(flat.mean()), float(flat.std())
        else:
            mean, std = 0.0, 1.0
        stats = (mean, std if std > 0 else 1.0)
    mean, std = stats
    transformed = [
        TrainingSample(tuple((np.asarray(s.features) - mean) / std), s.label, s.origin)
        for s in samples
    ]
    return transformed, stats
