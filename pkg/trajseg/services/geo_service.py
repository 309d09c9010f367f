"""
Geo Service
===========
Geographic primitives and the four interpolation kernels.

All kernels work per coordinate in degree space. Windows span tens to
hundreds of meters, where projection effects sit far below GPS noise, so
no projection step is applied. Distances use the haversine formula on a
sphere of mean radius 6,371,000 m.
"""

import math
from typing import Sequence, Tuple

import numpy as np

from trajseg.errors import AntimeridianError, DegenerateInputError
from trajseg.models.trajectory import GeoPoint, KernelKind, TimedPoint


EARTH_RADIUS_M = 6_371_000.0


def haversine_m(a: GeoPoint, b: GeoPoint) -> float:
    """
    Great-circle distance between two points.

    Args:
        a: First point
        b: Second point

    Returns:
        Distance in meters (symmetric, non-negative)

    Examples:
        >>> haversine_m(GeoPoint(0, 0), GeoPoint(0, 0))
        0.0
    """
    lat1, lon1, lat2, lon2 = map(math.radians, (a.lat, a.lon, b.lat, b.lon))
    dlat = lat2 - lat1
    dlon = lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    # Clamp rounding noise so antipodal pairs stay inside asin's domain
    h = min(1.0, max(0.0, h))
    return 2.0 * EARTH_RADIUS_M * math.asin(math.sqrt(h))


def haversine_array(lat1, lon1, lat2, lon2) -> np.ndarray:
    """Vectorised haversine over numpy arrays (degrees in, meters out)."""
    lat1, lon1, lat2, lon2 = (np.radians(np.asarray(x, dtype=float)) for x in (lat1, lon1, lat2, lon2))
    h = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.sqrt(np.clip(h, 0.0, 1.0)))


def geo_midpoint(a: GeoPoint, b: GeoPoint) -> GeoPoint:
    """
    Arithmetic mean of two nearby points.

    Raises:
        AntimeridianError: if the pair straddles the ±180° meridian
    """
    if abs(a.lon - b.lon) > 180.0:
        raise AntimeridianError(
            f"Midpoint of ({a.lat}, {a.lon}) and ({b.lat}, {b.lon}) crosses the antimeridian"
        )
    return GeoPoint((a.lat + b.lat) / 2.0, (a.lon + b.lon) / 2.0)


def meters_to_degrees(lat: float, east_m: float, north_m: float) -> Tuple[float, float]:
    """Convert a local east/north offset in meters to (dlat, dlon) in degrees."""
    dlat = math.degrees(north_m / EARTH_RADIUS_M)
    dlon = math.degrees(east_m / (EARTH_RADIUS_M * math.cos(math.radians(lat))))
    return dlat, dlon


def _check_support(points: Sequence[TimedPoint]) -> None:
    if len(points) != 3:
        raise DegenerateInputError(f"Kernels need exactly 3 support points, got {len(points)}")
    times = [p.t for p in points]
    if len(set(times)) != 3:
        raise DegenerateInputError(f"Duplicate timestamps among kernel support points: {times}")
    if not (times[0] < times[1] < times[2]):
        raise DegenerateInputError(f"Kernel support points not time-ordered: {times}")


def _random_walk(points: Sequence[TimedPoint], target_t: float) -> GeoPoint:
    # Zero-drift walk: expectation is the temporally nearest observation
    nearest = min(points, key=lambda p: abs(p.t - target_t))
    return nearest.position


def _linear(points: Sequence[TimedPoint], target_t: float) -> GeoPoint:
    dt = np.array([p.t - target_t for p in points])
    lat_fit = np.polyfit(dt, [p.lat for p in points], 1)
    lon_fit = np.polyfit(dt, [p.lon for p in points], 1)
    return GeoPoint.normalized(float(lat_fit[-1]), float(lon_fit[-1]))


def _kinematic(points: Sequence[TimedPoint], target_t: float) -> GeoPoint:
    p0, p1, p2 = points
    # Anchor on the side facing the target; backward estimates mirror forward ones
    forward = abs(target_t - p2.t) <= abs(target_t - p0.t)
    coords = []
    for attr in ("lat", "lon"):
        x0, x1, x2 = getattr(p0, attr), getattr(p1, attr), getattr(p2, attr)
        v01 = (x1 - x0) / (p1.t - p0.t)
        v12 = (x2 - x1) / (p2.t - p1.t)
        accel = 2.0 * (v12 - v01) / (p2.t - p0.t)
        if forward:
            anchor, anchor_t = x2, p2.t
            velocity = v12 + accel * (p2.t - p1.t) / 2.0
        else:
            anchor, anchor_t = x0, p0.t
            velocity = v01 - accel * (p1.t - p0.t) / 2.0
        step = target_t - anchor_t
        coords.append(anchor + velocity * step + 0.5 * accel * step * step)
    return GeoPoint.normalized(coords[0], coords[1])


def _cubic(points: Sequence[TimedPoint], target_t: float) -> GeoPoint:
    # Three supports pin a quadratic; the third-derivative term is taken as zero
    dt = np.array([p.t - target_t for p in points])
    lat_fit = np.polyfit(dt, [p.lat for p in points], 2)
    lon_fit = np.polyfit(dt, [p.lon for p in points], 2)
    return GeoPoint.normalized(float(lat_fit[-1]), float(lon_fit[-1]))


_KERNELS = {
    KernelKind.RANDOM_WALK: _random_walk,
    KernelKind.KINEMATIC: _kinematic,
    KernelKind.LINEAR: _linear,
    KernelKind.CUBIC: _cubic,
}


def extrapolate(points: Sequence[TimedPoint], target_t: float, kernel: KernelKind) -> GeoPoint:
    """
    Estimate the position at target_t from three time-ordered points.

    Args:
        points: Exactly 3 points with strictly increasing timestamps
        target_t: Time to estimate, at or beyond either edge of the points' span
        kernel: Motion model

    Returns:
        Estimated position

    Raises:
        DegenerateInputError: duplicate or unordered timestamps, wrong point count
    """
    _check_support(points)
    if points[0].t < target_t < points[-1].t:
        raise DegenerateInputError(
            f"Target time {target_t} lies inside the support span [{points[0].t}, {points[-1].t}]"
        )
    return _KERNELS[KernelKind.parse(kernel)](points, target_t)
