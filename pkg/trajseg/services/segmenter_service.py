"""
Segmenter Service
=================
WS-II inference: classify every q-window of the error signal, take a
per-point majority vote, collapse flagged runs into partitioning
positions, and emit segments.

Flow:
    error_signal -> vote -> decide -> collapse_runs -> SegmentationResult

Boundary points vote over the windows that actually cover them (fewer
than q near the signal ends). A point is flagged only on a strict
majority. Segments shorter than q can be missed; that is inherent to the
window size.
"""

import logging
from dataclasses import replace
from typing import Iterable, List, Optional, Set

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from trajseg.errors import ModelMismatchError, ValidationError
from trajseg.models.forest import ForestModel, ForestParams
from trajseg.models.trajectory import ErrorSignal, KernelKind, SegmentationResult, Trajectory, VoteTable
from trajseg.services.error_signal_service import error_signal
from trajseg.services.forest_service import fit, predict_batch
from trajseg.services.training_service import build_training_dataset, standardize_samples, validate_q

logger = logging.getLogger(__name__)


def vote(signal: ErrorSignal, model: ForestModel, q: int) -> VoteTable:
    """
    Classify every q-window and tally votes per covered point.

    Args:
        signal: Error signal of one trajectory
        model: Trained forest with model.q == q
        q: Window length

    Returns:
        VoteTable over the signal's point indices; empty with a warning when
        the signal is shorter than q
    """
    validate_q(q)
    if model.q != q:
        raise ModelMismatchError(f"Model was trained with q={model.q}, got q={q}")
    if len(signal) < q:
        message = f"signal of {signal.trajectory_id} has {len(signal)} values, fewer than q={q}"
        logger.warning(f"⚠️ Empty vote table: {message}")
        return VoteTable(signal.trajectory_id, warning=message)

    windows = sliding_window_view(np.asarray(signal.values, dtype=float), q)
    predictions = predict_batch(model, windows)
    kernel = np.ones(q, dtype=np.int64)
    # entry j is covered by windows j-q+1 .. j (clipped to the valid range)
    votes_positive = np.convolve(predictions, kernel)
    votes_cast = np.convolve(np.ones(len(predictions), dtype=np.int64), kernel)
    return VoteTable(
        signal.trajectory_id,
        tuple(signal.indices),
        tuple(int(v) for v in votes_cast),
        tuple(int(v) for v in votes_positive),
    )


def decide(votes: VoteTable) -> Set[int]:
    """Point indices where more than half of the covering windows predicted a split."""
    return {
        index
        for index, cast, positive in zip(votes.indices, votes.votes_cast, votes.votes_positive)
        if 2 * positive > cast
    }


def collapse_runs(flagged: Iterable[int], signal: ErrorSignal) -> List[int]:
    """
    Reduce each maximal run of consecutive flagged indices to one split.

    The split goes to the run's highest-error index (earliest on ties).

    Raises:
        ValidationError: if a flagged index has no defined error
    """
    ordered = sorted(set(flagged))
    missing = [i for i in ordered if not signal.has_index(i)]
    if missing:
        raise ValidationError(f"Flagged indices {missing} have no error value in {signal.trajectory_id}")

    splits = []
    run: List[int] = []
    for index in ordered:
        if run and index != run[-1] + 1:
            splits.append(_run_peak(run, signal))
            run = []
        run.append(index)
    if run:
        splits.append(_run_peak(run, signal))
    return splits


def _run_peak(run: List[int], signal: ErrorSignal) -> int:
    best = run[0]
    for index in run[1:]:
        if signal.error_at(index) > signal.error_at(best):
            best = index
    return best


def segment(
    traj: Trajectory,
    model: ForestModel,
    w: int,
    q: int,
    kernel: KernelKind,
) -> SegmentationResult:
    """
    Segment one trajectory with a trained model.

    Trajectories shorter than w (or whose signal is shorter than q) come
    back as a single segment.
    """
    if model.q != q:
        raise ModelMismatchError(f"Model was trained with q={model.q}, got q={q}")
    signal = error_signal(traj, w, kernel)
    table = vote(signal, model, q)
    splits = collapse_runs(decide(table), signal)
    return SegmentationResult.from_splits(traj.id, len(traj), splits)


def segment_many(
    trajectories: Iterable[Trajectory],
    model: ForestModel,
    w: int,
    q: int,
    kernel: KernelKind,
) -> List[SegmentationResult]:
    return [segment(traj, model, w, q, kernel) for traj in sorted(trajectories, key=lambda t: t.id)]


def train_model(
    trajectories: Iterable[Trajectory],
    w: int,
    q: int,
    kernel: KernelKind,
    hp: Optional[ForestParams] = None,
    seed: int = 42,
    standardize: bool = False,
    n_jobs: int = 1,
) -> ForestModel:
    """
    Full WS-II training: error signals, labeled windows, forest.

    The returned model records w and kernel so inference can reuse them.
    """
    kernel = KernelKind.parse(kernel)
    samples = build_training_dataset(trajectories, w, q, kernel)
    stats = None
    if standardize:
        samples, stats = standardize_samples(samples)
    model = fit(samples, hp, seed, n_jobs=n_jobs)
    return replace(model, w=w, kernel=kernel, feature_stats=stats)
