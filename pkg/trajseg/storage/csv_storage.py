"""
CSV Storage
===========
Points-file ingestion and every CSV the CLI writes.

POINTS FILE (header mandatory):
    traj_id,t,lat,lon[,label][,object_id]
- t is integer seconds; lat/lon decimal degrees
- rows of one trajectory may be interleaved with others; they are sorted by t
- a trajectory is labeled only if every one of its rows has a label
- object_id (optional) must be constant per trajectory; empty = traj_id

Errors name the 1-based file line (header = line 1) and carry a category
(schema, duplicate-timestamp, coordinate-range, partial-labels).

OUTPUT FILES:
- error signal: trajectory_id,point_index,error_m
- training set: trajectory_id,start_index,e1..eq,label
- segments:     trajectory_id,segment_id,start_index,end_index,start_t,end_t
- boxplot:      algorithm,fold,harmonic
"""

import logging
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np
import pandas as pd

from trajseg.errors import (
    CoordinateRangeError,
    DuplicateTimestampError,
    PartialLabelsError,
    PointsSchemaError,
)
from trajseg.models.trajectory import ErrorSignal, SegmentationResult, TrainingSample, Trajectory

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

REQUIRED_COLUMNS = ("traj_id", "t", "lat", "lon")
TEXT_COLUMNS = {"traj_id": str, "label": str, "object_id": str}
# pandas index 0 is file line 2 (after the header)
ROW_OFFSET = 2


def _file_row(index: int) -> int:
    return int(index) + ROW_OFFSET


def _numeric_column(frame: pd.DataFrame, column: str) -> pd.Series:
    values = frame[column]
    if not pd.api.types.is_numeric_dtype(values):
        coerced = pd.to_numeric(values, errors="coerce")
        bad = coerced.index[coerced.isna()]
        index = bad[0] if len(bad) else values.index[0]
        raise PointsSchemaError(f"column '{column}' has non-numeric value {values[index]!r}", _file_row(index))
    values = values.astype(float)
    non_finite = values.index[~np.isfinite(values.to_numpy())]
    if len(non_finite):
        index = non_finite[0]
        raise PointsSchemaError(f"column '{column}' has non-finite value {values[index]!r}", _file_row(index))
    return values


def load_trajectories(path: PathLike) -> List[Trajectory]:
    """
    Read a points CSV into trajectories.

    Args:
        path: Points file

    Returns:
        Trajectories sorted by id, points sorted by time

    Raises:
        PointsSchemaError: missing header/column, non-numeric or non-integer values
        DuplicateTimestampError: two rows share (traj_id, t)
        CoordinateRangeError: lat outside [-90, 90] or lon outside [-180, 180]
        PartialLabelsError: a trajectory with some labeled and some unlabeled rows
    """
    try:
        frame = pd.read_csv(
            path,
            dtype=TEXT_COLUMNS,
            keep_default_na=False,
            float_precision="round_trip",
        )
    except pd.errors.EmptyDataError:
        raise PointsSchemaError("file is empty (a header row is required)")
    except pd.errors.ParserError as e:
        raise PointsSchemaError(f"malformed CSV: {e}")

    missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
    if missing:
        raise PointsSchemaError(f"missing required column(s): {', '.join(missing)}", 1)
    if frame.empty:
        logger.info(f"No points in {path}")
        return []

    t = _numeric_column(frame, "t")
    fractional = t.index[t.to_numpy() != np.floor(t.to_numpy())]
    if len(fractional):
        raise PointsSchemaError(f"t must be integer seconds, got {t[fractional[0]]!r}", _file_row(fractional[0]))
    lat = _numeric_column(frame, "lat")
    lon = _numeric_column(frame, "lon")

    out_of_range = lat.index[(lat < -90.0) | (lat > 90.0)]
    if len(out_of_range):
        index = out_of_range[0]
        raise CoordinateRangeError(f"latitude {lat[index]} outside [-90, 90]", _file_row(index))
    out_of_range = lon.index[(lon < -180.0) | (lon > 180.0)]
    if len(out_of_range):
        index = out_of_range[0]
        raise CoordinateRangeError(f"longitude {lon[index]} outside [-180, 180]", _file_row(index))

    points = pd.DataFrame({
        "traj_id": frame["traj_id"],
        "t": t.astype(np.int64),
        "lat": lat,
        "lon": lon,
        "label": frame["label"] if "label" in frame.columns else "",
        "object_id": frame["object_id"] if "object_id" in frame.columns else "",
    })

    duplicated = points.index[points.duplicated(["traj_id", "t"], keep="first")]
    if len(duplicated):
        index = duplicated[0]
        raise DuplicateTimestampError(
            f"trajectory '{points.at[index, 'traj_id']}' repeats timestamp {points.at[index, 't']}",
            _file_row(index),
        )

    trajectories = []
    for traj_id, rows in points.groupby("traj_id", sort=True):
        trajectories.append(_to_trajectory(str(traj_id), rows))
    logger.info(f"✅ Loaded {len(trajectories)} trajectories ({len(points)} points) from {path}")
    return trajectories


def _to_trajectory(traj_id: str, rows: pd.DataFrame) -> Trajectory:
    unlabeled = rows.index[rows["label"] == ""]
    if 0 < len(unlabeled) < len(rows):
        raise PartialLabelsError(
            f"trajectory '{traj_id}' has {len(unlabeled)} unlabeled of {len(rows)} rows",
            _file_row(unlabeled[0]),
        )
    objects = sorted(set(rows["object_id"]) - {""})
    if len(objects) > 1 or (objects and (rows["object_id"] == "").any()):
        raise PointsSchemaError(
            f"trajectory '{traj_id}' has inconsistent object_id values {objects}",
            _file_row(rows.index[0]),
        )

    rows = rows.sort_values("t", kind="mergesort")
    labels = None if len(unlabeled) else list(rows["label"])
    return Trajectory.from_arrays(
        traj_id,
        rows["lat"].to_numpy(),
        rows["lon"].to_numpy(),
        rows["t"].to_numpy(),
        labels=labels,
        object_id=objects[0] if objects else None,
    )


def write_trajectories(path: PathLike, trajectories: Sequence[Trajectory]) -> None:
    """Write trajectories in the points-file format load_trajectories reads."""
    with_objects = any(traj.object_id != traj.id for traj in trajectories)
    records: List[Dict] = []
    for traj in sorted(trajectories, key=lambda tr: tr.id):
        for i, point in enumerate(traj.points):
            record = {
                "traj_id": traj.id,
                "t": int(point.t),
                "lat": point.lat,
                "lon": point.lon,
                "label": traj.labels[i] if traj.is_labeled else "",
            }
            if with_objects:
                record["object_id"] = traj.object_id
            records.append(record)
    columns = list(REQUIRED_COLUMNS) + ["label"] + (["object_id"] if with_objects else [])
    pd.DataFrame(records, columns=columns).to_csv(path, index=False)
    logger.info(f"💾 Wrote {len(records)} points to {path}")


def write_error_signals(path: PathLike, signals: Sequence[ErrorSignal]) -> None:
    records = [
        {"trajectory_id": signal.trajectory_id, "point_index": index, "error_m": value}
        for signal in signals
        for index, value in signal.entries
    ]
    pd.DataFrame(records, columns=["trajectory_id", "point_index", "error_m"]).to_csv(path, index=False)
    logger.info(f"💾 Wrote {len(records)} error values to {path}")


def write_training_set(path: PathLike, samples: Sequence[TrainingSample], q: int) -> None:
    feature_columns = [f"e{i}" for i in range(1, q + 1)]
    records = []
    for sample in samples:
        record = {"trajectory_id": sample.origin[0], "start_index": sample.origin[1]}
        record.update(zip(feature_columns, sample.features))
        record["label"] = sample.label
        records.append(record)
    columns = ["trajectory_id", "start_index"] + feature_columns + ["label"]
    pd.DataFrame(records, columns=columns).to_csv(path, index=False)
    logger.info(f"💾 Wrote {len(records)} training samples to {path}")


def write_segments(path: PathLike, results: Sequence[SegmentationResult], trajectories: Sequence[Trajectory]) -> None:
    by_id = {traj.id: traj for traj in trajectories}
    records = []
    for result in results:
        times = by_id[result.trajectory_id].times
        for segment_id, (start, end) in enumerate(result.segments):
            records.append({
                "trajectory_id": result.trajectory_id,
                "segment_id": segment_id,
                "start_index": start,
                "end_index": end,
                "start_t": int(times[start]),
                "end_t": int(times[end]),
            })
    columns = ["trajectory_id", "segment_id", "start_index", "end_index", "start_t", "end_t"]
    pd.DataFrame(records, columns=columns).to_csv(path, index=False)
    logger.info(f"💾 Wrote {len(records)} segments to {path}")


def write_boxplot(path: PathLike, reports) -> None:
    """Per-fold harmonic means, one row per (algorithm, test fold)."""
    records = [
        {"algorithm": report.algorithm, "fold": fold, "harmonic": value}
        for report in reports
        for fold, value in zip(report.folds, report.fold_means)
    ]
    pd.DataFrame(records, columns=["algorithm", "fold", "harmonic"]).to_csv(path, index=False)
    logger.info(f"💾 Wrote boxplot data for {len(reports)} algorithm(s) to {path}")
