"""
Shared fixtures for the trajseg test suite.

Track builders work in a local east/north meter frame so expected
distances can be written down directly.
"""

import os
import sys
from typing import Callable, List, Optional, Sequence

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from trajseg.generators.synthetic_generator import SynthSpec, generate_synthetic  # noqa: E402
from trajseg.models.forest import ForestModel, ForestParams, Tree  # noqa: E402
from trajseg.models.trajectory import Trajectory  # noqa: E402
from trajseg.services.geo_service import meters_to_degrees  # noqa: E402


def track_from_meters(
    traj_id: str,
    east_m: Sequence[float],
    north_m: Sequence[float],
    times: Sequence[float],
    labels: Optional[Sequence[str]] = None,
    origin=(0.0, 0.0),
    object_id: Optional[str] = None,
) -> Trajectory:
    lat0, lon0 = origin
    dlat_per_m, _ = meters_to_degrees(lat0, 0.0, 1.0)
    _, dlon_per_m = meters_to_degrees(lat0, 1.0, 0.0)
    lats = lat0 + np.asarray(north_m, dtype=float) * dlat_per_m
    lons = lon0 + np.asarray(east_m, dtype=float) * dlon_per_m
    return Trajectory.from_arrays(traj_id, lats, lons, times, labels=labels, object_id=object_id)


def constant_model(value: float, q: int = 7, n_trees: int = 3) -> ForestModel:
    params = ForestParams(n_trees=n_trees)
    return ForestModel(trees=tuple(Tree.leaf(value) for _ in range(n_trees)), q=q, params=params, seed=0)


@pytest.fixture
def make_track() -> Callable[..., Trajectory]:
    """Factory: trajectory from east/north meter offsets around (0, 0)."""
    return track_from_meters


@pytest.fixture
def straight_track() -> Callable[..., Trajectory]:
    """Factory: n points heading east at constant speed."""

    def build(n: int, step_m: float = 100.0, dt: float = 10.0, traj_id: str = "straight",
              labels: Optional[Sequence[str]] = None) -> Trajectory:
        east = step_m * np.arange(n)
        return track_from_meters(traj_id, east, np.zeros(n), dt * np.arange(n), labels=labels)

    return build


@pytest.fixture
def dwell_track() -> Trajectory:
    """
    Move 10 points (100 m apart, 60 s apart), dwell 10 points inside a
    few centimeters for 540 s, then move 10 more points.
    Ground truth segments: [0, 9], [10, 19], [20, 29].
    """
    east: List[float] = []
    north: List[float] = []
    labels: List[str] = []
    for i in range(10):
        east.append(100.0 * i)
        north.append(0.0)
        labels.append("move-a")
    dwell_at = 100.0 * 9 + 1000.0
    for i in range(10):
        east.append(dwell_at + 0.01 * (i % 2))
        north.append(0.01 * (i % 3))
        labels.append("stay")
    for i in range(10):
        east.append(dwell_at + 1000.0 + 100.0 * i)
        north.append(0.0)
        labels.append("move-b")
    times = 60.0 * np.arange(30)
    return track_from_meters("dwell", east, north, times, labels=labels)


@pytest.fixture
def make_constant_model() -> Callable[..., ForestModel]:
    return constant_model


@pytest.fixture(scope="session")
def small_synthetic() -> List[Trajectory]:
    """Twelve short labeled trajectories, one object each."""
    spec = SynthSpec(seed=3, n_trajectories=12, points_per_segment=(20, 30), segments_per_trajectory=(2, 4))
    return generate_synthetic(spec)
