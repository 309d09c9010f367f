"""
Synthetic Trajectory Generator
==============================
Labeled GPS-like trajectories with known partitioning positions, for
experiments that need ground truth.

Each trajectory alternates between two behaviors:
- directed: near-constant speed along a heading that drifts by a small
  Gaussian jitter each step
- wander:   isotropic Gaussian steps around the current position, scaled
  so the mean step length matches the directed step (speed alone does
  not tell the two behaviors apart)

Positions are built in a local east/north frame (meters) around the
origin, converted to degrees with one fixed scale per trajectory, then
blurred with Gaussian GPS noise. Every point is labeled with the behavior
that produced it, so splits_from_labels() recovers the true transitions.
"""

import logging
import math
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from trajseg.models.trajectory import Trajectory
from trajseg.services.geo_service import meters_to_degrees

logger = logging.getLogger(__name__)

DIRECTED = "directed"
WANDER = "wander"
BEHAVIORS = (DIRECTED, WANDER)

# Trajectories start up to this far (meters) from the origin
ORIGIN_SPREAD_M = 5_000.0


class SynthSpec(BaseModel):
    """Generator settings. Defaults reproduce the reference benchmark."""

    model_config = ConfigDict(frozen=True)

    seed: int = 42
    n_trajectories: int = Field(30, ge=1)
    points_per_segment: Tuple[int, int] = (40, 80)
    segments_per_trajectory: Tuple[int, int] = (4, 8)
    gps_noise_m: float = Field(5.0, ge=0.0, allow_inf_nan=False)
    directed_speed_mps: float = Field(12.0, gt=0.0)
    heading_jitter_deg: float = Field(3.0, ge=0.0)
    # per-axis std; mean step length is 96 * sqrt(pi / 2), about 120 m = 12 m/s * 10 s
    wander_step_m: float = Field(96.0, ge=0.0)
    sample_interval_s: int = Field(10, ge=1)
    origin: Tuple[float, float] = (44.6488, -63.5752)
    start_time: int = Field(1_600_000_000, ge=0)
    trajectories_per_object: int = Field(1, ge=1)

    @field_validator("points_per_segment", "segments_per_trajectory")
    @classmethod
    def _range_not_empty(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        low, high = value
        if low < 1 or high < low:
            raise ValueError(f"range {value} must satisfy 1 <= min <= max")
        return value

    @field_validator("origin")
    @classmethod
    def _origin_on_earth(cls, value: Tuple[float, float]) -> Tuple[float, float]:
        lat, lon = value
        if not (-80.0 <= lat <= 80.0 and -175.0 <= lon <= 175.0):
            raise ValueError(f"origin {value} too close to a pole or the antimeridian")
        return value


class SyntheticTrajectoryGenerator:
    """Draws trajectories from one seeded numpy Generator, in a fixed order."""

    def __init__(self, spec: SynthSpec):
        self.spec = spec
        self.rng = np.random.default_rng(spec.seed)

    def _directed_steps(self, count: int) -> np.ndarray:
        step = self.spec.directed_speed_mps * self.spec.sample_interval_s
        heading = self.rng.uniform(0.0, 2.0 * math.pi)
        jitter = self.rng.normal(0.0, math.radians(self.spec.heading_jitter_deg), size=count)
        headings = heading + np.cumsum(jitter)
        return np.column_stack([step * np.sin(headings), step * np.cos(headings)])

    def _wander_steps(self, count: int) -> np.ndarray:
        return self.rng.normal(0.0, self.spec.wander_step_m, size=(count, 2))

    def _one(self, index: int) -> Trajectory:
        spec = self.spec
        n_segments = int(self.rng.integers(spec.segments_per_trajectory[0], spec.segments_per_trajectory[1] + 1))
        first = int(self.rng.integers(0, 2))

        steps: List[np.ndarray] = []
        labels: List[str] = []
        for seg in range(n_segments):
            behavior = BEHAVIORS[(first + seg) % 2]
            count = int(self.rng.integers(spec.points_per_segment[0], spec.points_per_segment[1] + 1))
            steps.append(self._directed_steps(count) if behavior == DIRECTED else self._wander_steps(count))
            labels.extend([behavior] * count)

        start = self.rng.uniform(-ORIGIN_SPREAD_M, ORIGIN_SPREAD_M, size=2)
        offsets = start + np.cumsum(np.vstack(steps), axis=0)
        if spec.gps_noise_m > 0:
            offsets = offsets + self.rng.normal(0.0, spec.gps_noise_m, size=offsets.shape)

        origin_lat, origin_lon = spec.origin
        dlat_per_m, _ = meters_to_degrees(origin_lat, 0.0, 1.0)
        _, dlon_per_m = meters_to_degrees(origin_lat, 1.0, 0.0)
        lats = origin_lat + offsets[:, 1] * dlat_per_m
        lons = origin_lon + offsets[:, 0] * dlon_per_m
        times = spec.start_time + spec.sample_interval_s * np.arange(len(labels), dtype=np.int64)

        return Trajectory.from_arrays(
            f"traj{index:03d}",
            lats,
            lons,
            times,
            labels=labels,
            object_id=f"obj{index // spec.trajectories_per_object:03d}",
        )

    def generate(self) -> List[Trajectory]:
        trajectories = [self._one(i) for i in range(self.spec.n_trajectories)]
        n_points = sum(len(t) for t in trajectories)
        logger.info(f"✅ Generated {len(trajectories)} synthetic trajectories ({n_points} points, seed={self.spec.seed})")
        return trajectories


def generate_synthetic(spec: SynthSpec) -> List[Trajectory]:
    """
    Generate labeled trajectories.

    Args:
        spec: Generator settings (seed included)

    Returns:
        Trajectories ordered by id, each labeled per point
    """
    return SyntheticTrajectoryGenerator(spec).generate()
