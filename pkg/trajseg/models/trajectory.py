"""
Trajectory domain types.

Shared by every service: geographic points, trajectories with optional
ground-truth labels, error signals, training samples, vote tables and
segmentation results.

INDEXING:
All point indices are 0-based. With w=7 a 26-point trajectory has error
values for indices 3..22.

PARTITION CONTRACT:
A SegmentationResult over n points is a list of inclusive (start, end)
spans. The first starts at 0, the last ends at n-1, and each start is the
previous end + 1. A split index (partitioning position) is the last point
of every segment except the final one.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from trajseg.errors import ValidationError


class KernelKind(str, Enum):
    """Motion model used to extrapolate where an object should be."""

    RANDOM_WALK = "random-walk"
    KINEMATIC = "kinematic"
    LINEAR = "linear"
    CUBIC = "cubic"

    @classmethod
    def parse(cls, value: "str | KernelKind") -> "KernelKind":
        """
        Parse a kernel name as typed on the command line.

        Accepts the enum values plus loose spellings such as
        "RandomWalk", "random_walk" or "randomwalk".
        """
        if isinstance(value, KernelKind):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        for kind in cls:
            if kind.value.replace("-", "") == key:
                return kind
        raise ValidationError(
            f"Unknown kernel '{value}' (expected one of: {', '.join(k.value for k in cls)})"
        )


@dataclass(frozen=True)
class GeoPoint:
    """Latitude/longitude in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (-90.0 <= self.lat <= 90.0) or not np.isfinite(self.lat):
            raise ValidationError(f"Latitude {self.lat} outside [-90, 90]")
        if not (-180.0 <= self.lon <= 180.0) or not np.isfinite(self.lon):
            raise ValidationError(f"Longitude {self.lon} outside [-180, 180]")

    @classmethod
    def normalized(cls, lat: float, lon: float) -> "GeoPoint":
        """Build a point after wrapping longitude into [-180, 180]."""
        if -180.0 <= lon <= 180.0:
            return cls(lat, lon)
        wrapped = ((lon + 180.0) % 360.0) - 180.0
        return cls(lat, wrapped)


@dataclass(frozen=True)
class TimedPoint:
    """A position observed at time t (seconds since epoch)."""

    position: GeoPoint
    t: float

    def __post_init__(self):
        if not np.isfinite(self.t):
            raise ValidationError(f"Timestamp {self.t} is not finite")

    @classmethod
    def at(cls, lat: float, lon: float, t: float) -> "TimedPoint":
        return cls(GeoPoint(lat, lon), t)

    @property
    def lat(self) -> float:
        return self.position.lat

    @property
    def lon(self) -> float:
        return self.position.lon


@dataclass(frozen=True)
class Trajectory:
    """
    Time-ordered points of one moving object.

    Args:
        id: Trajectory identifier
        points: Points with strictly increasing timestamps
        labels: Optional per-point semantic label (same length as points)
        object_id: Moving object the trajectory belongs to (defaults to id).
            All trajectories of one object always share a fold.
    """

    id: str
    points: Tuple[TimedPoint, ...]
    labels: Optional[Tuple[str, ...]] = None
    object_id: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
            if len(self.labels) != len(self.points):
                raise ValidationError(
                    f"Trajectory {self.id}: {len(self.labels)} labels for {len(self.points)} points"
                )
        if self.object_id is None:
            object.__setattr__(self, "object_id", self.id)
        for i in range(1, len(self.points)):
            if self.points[i].t <= self.points[i - 1].t:
                raise ValidationError(
                    f"Trajectory {self.id}: timestamps not strictly increasing at index {i}"
                )

    @classmethod
    def from_arrays(
        cls,
        traj_id: str,
        lats: Sequence[float],
        lons: Sequence[float],
        times: Sequence[float],
        labels: Optional[Sequence[str]] = None,
        object_id: Optional[str] = None,
    ) -> "Trajectory":
        points = tuple(
            TimedPoint(GeoPoint(float(lat), float(lon)), float(t))
            for lat, lon, t in zip(lats, lons, times)
        )
        return cls(traj_id, points, tuple(labels) if labels is not None else None, object_id)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    @cached_property
    def lats(self) -> np.ndarray:
        return np.array([p.position.lat for p in self.points], dtype=float)

    @cached_property
    def lons(self) -> np.ndarray:
        return np.array([p.position.lon for p in self.points], dtype=float)

    @cached_property
    def times(self) -> np.ndarray:
        return np.array([p.t for p in self.points], dtype=float)

    def with_labels(self, labels: Optional[Sequence[str]]) -> "Trajectory":
        return Trajectory(self.id, self.points, tuple(labels) if labels is not None else None, self.object_id)


@dataclass(frozen=True)
class ErrorSignal:
    """
    Per-point interpolation error (meters) of one trajectory.

    Only interior points carry a value: the first and last h = (w-1)/2
    indices are absent, never filled with sentinels.
    """

    trajectory_id: str
    window_size: int
    indices: Tuple[int, ...] = ()
    values: Tuple[float, ...] = ()
    warning: Optional[str] = None

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def entries(self) -> List[Tuple[int, float]]:
        return list(zip(self.indices, self.values))

    @cached_property
    def _position(self) -> dict:
        return {idx: pos for pos, idx in enumerate(self.indices)}

    def error_at(self, index: int) -> float:
        """Error at a point index; KeyError if the index has no defined error."""
        return self.values[self._position[index]]

    def has_index(self, index: int) -> bool:
        return index in self._position

    def max_error(self) -> float:
        return max(self.values) if self.values else 0.0


@dataclass(frozen=True)
class GroundTruthSplits:
    """Indices that end a ground-truth segment (label[i] != label[i+1])."""

    trajectory_id: str
    split_indices: Tuple[int, ...] = ()


@dataclass(frozen=True)
class TrainingSample:
    """q consecutive error values and whether they cover a partitioning position."""

    features: Tuple[float, ...]
    label: int
    origin: Tuple[str, int]


@dataclass(frozen=True)
class VoteTable:
    """Per-point window votes collected during inference."""

    trajectory_id: str
    indices: Tuple[int, ...] = ()
    votes_cast: Tuple[int, ...] = ()
    votes_positive: Tuple[int, ...] = ()
    warning: Optional[str] = None

    def __len__(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class SegmentationResult:
    """Ordered, exhaustive, non-overlapping partition of a trajectory."""

    trajectory_id: str
    n_points: int
    split_indices: Tuple[int, ...]
    segments: Tuple[Tuple[int, int], ...] = field(default=())

    @classmethod
    def from_splits(cls, trajectory_id: str, n_points: int, splits: Iterable[int]) -> "SegmentationResult":
        """
        Build spans from partitioning positions.

        Args:
            trajectory_id: Trajectory the result belongs to
            n_points: Number of points in the trajectory
            splits: Indices that end a segment, each in [0, n_points - 1)

        Returns:
            SegmentationResult satisfying the partition contract
        """
        ordered = tuple(sorted(set(int(s) for s in splits)))
        for s in ordered:
            if not 0 <= s < n_points - 1:
                raise ValidationError(
                    f"Trajectory {trajectory_id}: split {s} outside [0, {n_points - 1})"
                )
        if n_points == 0:
            return cls(trajectory_id, 0, (), ())
        segments = []
        start = 0
        for s in ordered:
            segments.append((start, s))
            start = s + 1
        segments.append((start, n_points - 1))
        return cls(trajectory_id, n_points, ordered, tuple(segments))

    def check_partition(self) -> bool:
        """True when the spans are consecutive, non-overlapping and exhaustive."""
        if self.n_points == 0:
            return self.segments == ()
        if not self.segments or self.segments[0][0] != 0 or self.segments[-1][1] != self.n_points - 1:
            return False
        if len(self.segments) != len(self.split_indices) + 1:
            return False
        for (s0, e0), (s1, _) in zip(self.segments, self.segments[1:]):
            if s1 != e0 + 1:
                return False
        return all(start <= end for start, end in self.segments)

    def segment_of(self, index: int) -> int:
        for seg_id, (start, end) in enumerate(self.segments):
            if start <= index <= end:
                return seg_id
        raise IndexError(f"Point {index} outside trajectory {self.trajectory_id}")


@dataclass(frozen=True)
class SegmentScore:
    """Purity, coverage and their harmonic mean for one segmentation."""

    purity: float
    coverage: float
    harmonic: float

    @classmethod
    def from_purity_coverage(cls, purity: float, coverage: float) -> "SegmentScore":
        total = purity + coverage
        harmonic = 0.0 if total == 0 else 2.0 * purity * coverage / total
        return cls(purity, coverage, harmonic)
