"""
Error Signal Service
====================
Slides a w-point window over a trajectory and measures how far each
interior point sits from where the kernel says it should be.

For a window centred on point m the forward estimate comes from the first
three points, the backward estimate from the last three, both evaluated
at the centre timestamp. The error is the haversine distance between the
midpoint of the two estimates and the observed centre point.
"""

import logging
import numbers
from typing import Iterable, List, Sequence

from trajseg.errors import ValidationError
from trajseg.models.trajectory import ErrorSignal, KernelKind, TimedPoint, Trajectory
from trajseg.services.geo_service import extrapolate, geo_midpoint, haversine_m

logger = logging.getLogger(__name__)


def validate_window_size(w: int) -> int:
    """Window sizes must be odd and at least 7 (three support points per side plus the centre)."""
    if not isinstance(w, numbers.Integral) or isinstance(w, bool) or w < 7 or w % 2 == 0:
        raise ValidationError(f"Window size w must be an odd integer >= 7, got {w!r}")
    return w


def window_error(window: Sequence[TimedPoint], kernel: KernelKind) -> float:
    """
    Interpolation error of the centre point of one window.

    Args:
        window: w time-ordered points (w odd, >= 7)
        kernel: Motion model used for both estimates

    Returns:
        Error in meters
    """
    w = validate_window_size(len(window))
    h = (w - 1) // 2
    centre = window[h]
    forward = extrapolate(window[:3], centre.t, kernel)
    backward = extrapolate(window[-3:], centre.t, kernel)
    return haversine_m(geo_midpoint(forward, backward), centre.position)


def error_signal(traj: Trajectory, w: int, kernel: KernelKind) -> ErrorSignal:
    """
    Compute the error signal of a whole trajectory.

    Args:
        traj: Trajectory to process
        w: Window size (odd, >= 7)
        kernel: Motion model

    Returns:
        ErrorSignal with one entry per interior index h..n-h-1. Trajectories
        shorter than w give an empty signal with the warning flag set.
    """
    validate_window_size(w)
    kernel = KernelKind.parse(kernel)
    n = len(traj)
    if n < w:
        message = f"trajectory {traj.id} has {n} points, fewer than window size {w}"
        logger.warning(f"⚠️ Empty error signal: {message}")
        return ErrorSignal(traj.id, w, warning=message)

    h = (w - 1) // 2
    points = traj.points
    indices: List[int] = []
    values: List[float] = []
    for centre in range(h, n - h):
        indices.append(centre)
        values.append(window_error(points[centre - h:centre + h + 1], kernel))

    logger.debug(f"Error signal for {traj.id}: {len(values)} values (w={w}, kernel={kernel.value})")
    return ErrorSignal(traj.id, w, tuple(indices), tuple(values))


def error_signals(trajectories: Iterable[Trajectory], w: int, kernel: KernelKind) -> List[ErrorSignal]:
    """Error signals for many trajectories, ordered by trajectory id."""
    return [error_signal(traj, w, kernel) for traj in sorted(trajectories, key=lambda t: t.id)]
