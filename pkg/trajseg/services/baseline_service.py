"""
Baseline Service
================
Reference segmenters producing SegmentationResult under the same
partition contract as WS-II:

- OWS: threshold the interpolation error signal at epsilon
- SPD: stay-point detection with distance and time thresholds
- CB-SMoT: stop/move clustering over distance-along-trajectory neighborhoods

Each baseline comes with a grid-search tuner that picks parameters on a
labeled tuning fold by mean harmonic score.
"""

import itertools
import logging
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from trajseg.errors import EmptyInputError
from trajseg.models.trajectory import ErrorSignal, KernelKind, SegmentationResult, Trajectory
from trajseg.services.error_signal_service import error_signal, validate_window_size
from trajseg.services.evaluation_service import score
from trajseg.services.geo_service import haversine_array
from trajseg.services.segmenter_service import collapse_runs

logger = logging.getLogger(__name__)

P = TypeVar("P")

DEFAULT_DISTANCE_GRID_M = (25.0, 50.0, 100.0, 150.0, 200.0, 300.0, 500.0)
DEFAULT_TIME_GRID_S = (60.0, 120.0, 300.0, 600.0, 900.0, 1200.0)
EPSILON_STEP_M = 5.0
KERNEL_ORDER = (KernelKind.RANDOM_WALK, KernelKind.KINEMATIC, KernelKind.LINEAR, KernelKind.CUBIC)


class OwsParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    w: int = 7
    kernel: KernelKind = KernelKind.RANDOM_WALK
    epsilon: float = Field(..., gt=0, allow_inf_nan=False)

    @field_validator("w")
    @classmethod
    def _odd_window(cls, value: int) -> int:
        return validate_window_size(value)

    @field_validator("kernel", mode="before")
    @classmethod
    def _parse_kernel(cls, value):
        return KernelKind.parse(value)


class SpdParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta_d: float = Field(..., gt=0, allow_inf_nan=False)
    theta_t: float = Field(..., gt=0, allow_inf_nan=False)


class CbSmotParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    eps: float = Field(..., gt=0, allow_inf_nan=False)
    min_time: float = Field(..., gt=0, allow_inf_nan=False)


# ---------------------------------------------------------------------------
# OWS
# ---------------------------------------------------------------------------

def ows_from_signal(traj: Trajectory, signal: ErrorSignal, epsilon: float) -> SegmentationResult:
    flagged = [i for i, err in zip(signal.indices, signal.values) if err > epsilon]
    return SegmentationResult.from_splits(traj.id, len(traj), collapse_runs(flagged, signal))


def ows_segment(traj: Trajectory, p: OwsParams) -> SegmentationResult:
    """
    Flag every index whose error exceeds epsilon and collapse runs like WS-II.
    """
    return ows_from_signal(traj, error_signal(traj, p.w, p.kernel), p.epsilon)


def default_epsilon_grid(signals: Iterable[ErrorSignal]) -> List[float]:
    """5, 10, ... up to the 95th percentile of all error values (at least [5])."""
    values = [v for s in signals for v in s.values]
    if not values:
        return [EPSILON_STEP_M]
    upper = float(np.percentile(values, 95))
    steps = max(1, int(upper // EPSILON_STEP_M))
    return [EPSILON_STEP_M * k for k in range(1, steps + 1)]


def ows_tune_epsilon(
    trajectories: Sequence[Trajectory],
    candidate_grid: Optional[Sequence[float]] = None,
    w: int = 7,
    kernel: KernelKind = KernelKind.RANDOM_WALK,
) -> float:
    """
    Pick the epsilon with the best mean harmonic score on a tuning fold.

    Args:
        trajectories: Labeled tuning trajectories
        candidate_grid: Epsilons to try; default_epsilon_grid when None
        w: Window size
        kernel: Motion model

    Returns:
        Best epsilon (smallest on ties)

    Raises:
        EmptyInputError: empty tuning fold
    """
    return ows_tune(trajectories, w=w, kernels=[kernel], candidate_grid=candidate_grid).epsilon


def ows_tune(
    trajectories: Sequence[Trajectory],
    w: int = 7,
    kernels: Sequence[KernelKind] = KERNEL_ORDER,
    candidate_grid: Optional[Sequence[float]] = None,
) -> OwsParams:
    """
    Joint kernel x epsilon search. Ties keep the earlier kernel, then the smaller epsilon.
    """
    if not trajectories:
        raise EmptyInputError("OWS tuning needs at least one trajectory")
    best: Optional[Tuple[float, OwsParams]] = None
    for kernel in kernels:
        kernel = KernelKind.parse(kernel)
        signals = {traj.id: error_signal(traj, w, kernel) for traj in trajectories}
        grid = sorted(candidate_grid) if candidate_grid is not None else default_epsilon_grid(signals.values())
        candidates = [OwsParams(w=w, kernel=kernel, epsilon=eps) for eps in grid]
        params, mean_h = grid_search(
            trajectories,
            candidates,
            lambda traj, p: ows_from_signal(traj, signals[traj.id], p.epsilon),
        )
        if best is None or mean_h > best[0]:
            best = (mean_h, params)
    logger.info(f"OWS tuned: kernel={best[1].kernel.value}, epsilon={best[1].epsilon} (H={best[0]:.4f})")
    return best[1]


# ---------------------------------------------------------------------------
# SPD
# ---------------------------------------------------------------------------

def _spans_to_result(traj: Trajectory, spans: List[Tuple[int, int]]) -> SegmentationResult:
    """Fill the gaps between detected spans with move segments."""
    n = len(traj)
    splits = set()
    for start, end in spans:
        if start > 0:
            splits.add(start - 1)
        if end < n - 1:
            splits.add(end)
    return SegmentationResult.from_splits(traj.id, n, splits)


def stay_points(traj: Trajectory, p: SpdParams) -> List[Tuple[int, int]]:
    """
    Inclusive index spans of stay points.

    From anchor i, j is the first later point farther than theta_d from i.
    If the object lingered longer than theta_t (t[j-1] - t[i]), i..j-1 is a
    stay point and the scan resumes at j; otherwise it resumes at i + 1.
    """
    n = len(traj)
    lats, lons, times = traj.lats, traj.lons, traj.times
    spans = []
    i = 0
    while i < n - 1:
        distances = haversine_array(lats[i], lons[i], lats[i + 1:], lons[i + 1:])
        beyond = np.nonzero(distances > p.theta_d)[0]
        j = i + 1 + int(beyond[0]) if beyond.size else n
        if times[j - 1] - times[i] > p.theta_t:
            spans.append((i, j - 1))
            i = j
        else:
            i += 1
    return spans


def spd_segment(traj: Trajectory, p: SpdParams) -> SegmentationResult:
    """Stay points become segments; runs between them become move segments."""
    return _spans_to_result(traj, stay_points(traj, p))


# ---------------------------------------------------------------------------
# CB-SMoT
# ---------------------------------------------------------------------------

def linear_neighborhoods(traj: Trajectory, eps: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    For each point, the maximal run of consecutive points whose path
    distance from it is at most eps, as (lo, hi) index arrays.
    """
    n = len(traj)
    if n == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    steps = haversine_array(traj.lats[:-1], traj.lons[:-1], traj.lats[1:], traj.lons[1:])
    along = np.concatenate([[0.0], np.cumsum(steps)])
    lo = np.searchsorted(along, along - eps, side="left")
    hi = np.searchsorted(along, along + eps, side="right") - 1
    return lo.astype(np.int64), hi.astype(np.int64)


def stop_clusters(traj: Trajectory, p: CbSmotParams) -> List[Tuple[int, int]]:
    """
    Core points have neighborhoods lasting at least min_time; overlapping
    core neighborhoods merge into one stop.
    """
    lo, hi = linear_neighborhoods(traj, p.eps)
    times = traj.times
    spans: List[Tuple[int, int]] = []
    for start, end in zip(lo, hi):
        if times[end] - times[start] < p.min_time:
            continue
        start, end = int(start), int(end)
        if spans and start <= spans[-1][1]:
            spans[-1] = (spans[-1][0], max(spans[-1][1], end))
        else:
            spans.append((start, end))
    return spans


def cbsmot_segment(traj: Trajectory, p: CbSmotParams) -> SegmentationResult:
    """Stops become segments; moves fill the gaps."""
    return _spans_to_result(traj, stop_clusters(traj, p))


# ---------------------------------------------------------------------------
# Tuning
# ---------------------------------------------------------------------------

def grid_search(
    trajectories: Sequence[Trajectory],
    candidates: Sequence[P],
    segment_fn: Callable[[Trajectory, P], SegmentationResult],
) -> Tuple[P, float]:
    """
    Evaluate each candidate on every trajectory; keep the best mean harmonic.

    Ties keep the first candidate in grid order.

    Raises:
        EmptyInputError: empty tuning fold or empty grid
    """
    if not trajectories:
        raise EmptyInputError("Grid search needs at least one tuning trajectory")
    if not candidates:
        raise EmptyInputError("Grid search needs at least one candidate")

    best_params, best_score = None, -1.0
    for params in candidates:
        harmonics = [score(segment_fn(traj, params), traj).harmonic for traj in trajectories]
        mean = float(np.mean(harmonics))
        logger.debug(f"grid candidate {params}: H={mean:.4f}")
        if mean > best_score:
            best_params, best_score = params, mean
    return best_params, best_score


def tune_spd(
    trajectories: Sequence[Trajectory],
    grid: Optional[Dict[str, Sequence[float]]] = None,
) -> SpdParams:
    grid = grid or {}
    candidates = [
        SpdParams(theta_d=d, theta_t=t)
        for d, t in itertools.product(grid.get("theta_d", DEFAULT_DISTANCE_GRID_M),
                                      grid.get("theta_t", DEFAULT_TIME_GRID_S))
    ]
    params, best = grid_search(trajectories, candidates, spd_segment)
    logger.info(f"SPD tuned: theta_d={params.theta_d}, theta_t={params.theta_t} (H={best:.4f})")
    return params


def tune_cbsmot(
    trajectories: Sequence[Trajectory],
    grid: Optional[Dict[str, Sequence[float]]] = None,
) -> CbSmotParams:
    grid = grid or {}
    candidates = [
        CbSmotParams(eps=e, min_time=t)
        for e, t in itertools.product(grid.get("eps", DEFAULT_DISTANCE_GRID_M),
                                      grid.get("min_time", DEFAULT_TIME_GRID_S))
    ]
    params, best = grid_search(trajectories, candidates, cbsmot_segment)
    logger.info(f"CB-SMoT tuned: eps={params.eps}, min_time={params.min_time} (H={best:.4f})")
    return params
