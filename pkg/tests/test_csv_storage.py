"""
Test CSV Storage
================
"""

import pandas as pd
import pytest

from trajseg.errors import (
    CoordinateRangeError,
    DuplicateTimestampError,
    PartialLabelsError,
    PointsFileError,
    PointsSchemaError,
)
from trajseg.models.trajectory import ErrorSignal, GroundTruthSplits, SegmentationResult
from trajseg.services.training_service import build_training_set
from trajseg.storage.csv_storage import (
    load_trajectories,
    write_error_signals,
    write_segments,
    write_training_set,
    write_trajectories,
)


def points_file(tmp_path, text):
    path = tmp_path / "points.csv"
    path.write_text(text)
    return path


class TestLoadTrajectories:
    def test_header_only(self, tmp_path):
        assert load_trajectories(points_file(tmp_path, "traj_id,t,lat,lon\n")) == []

    def test_interleaved_rows_are_grouped_and_sorted(self, tmp_path):
        path = points_file(tmp_path, (
            "traj_id,t,lat,lon\n"
            "b,20,1.0,1.0\n"
            "a,10,0.0,0.0\n"
            "b,10,1.5,1.5\n"
            "a,5,0.5,0.5\n"
        ))
        a, b = load_trajectories(path)
        assert (a.id, b.id) == ("a", "b")
        assert list(a.times) == [5.0, 10.0]
        assert list(b.lats) == [1.5, 1.0]
        assert not a.is_labeled

    def test_labels_and_objects(self, tmp_path):
        path = points_file(tmp_path, (
            "traj_id,t,lat,lon,label,object_id\n"
            "a,0,0.0,0.0,walk,bus7\n"
            "a,1,0.0,0.0,ride,bus7\n"
        ))
        (traj,) = load_trajectories(path)
        assert traj.labels == ("walk", "ride")
        assert traj.object_id == "bus7"

    def test_missing_object_id_defaults_to_trajectory(self, tmp_path):
        path = points_file(tmp_path, "traj_id,t,lat,lon,object_id\na,0,0,0,\n")
        (traj,) = load_trajectories(path)
        assert traj.object_id == "a"

    def test_latitude_out_of_range_names_the_row(self, tmp_path):
        path = points_file(tmp_path, "traj_id,t,lat,lon\na,0,0.0,0.0\na,1,95.0,0.0\n")
        with pytest.raises(CoordinateRangeError) as excinfo:
            load_trajectories(path)
        assert excinfo.value.row == 3

    def test_longitude_out_of_range(self, tmp_path):
        with pytest.raises(CoordinateRangeError):
            load_trajectories(points_file(tmp_path, "traj_id,t,lat,lon\na,0,0.0,181.0\n"))

    def test_duplicate_timestamp(self, tmp_path):
        path = points_file(tmp_path, "traj_id,t,lat,lon\na,0,0,0\nb,0,0,0\na,0,1,1\n")
        with pytest.raises(DuplicateTimestampError) as excinfo:
            load_trajectories(path)
        assert excinfo.value.row == 4

    def test_partial_labels(self, tmp_path):
        path = points_file(tmp_path, "traj_id,t,lat,lon,label\na,0,0,0,x\na,1,0,0,\n")
        with pytest.raises(PartialLabelsError):
            load_trajectories(path)

    def test_inconsistent_object_id(self, tmp_path):
        path = points_file(tmp_path, "traj_id,t,lat,lon,object_id\na,0,0,0,o1\na,1,0,0,o2\n")
        with pytest.raises(PointsSchemaError):
            load_trajectories(path)

    def test_fractional_time(self, tmp_path):
        with pytest.raises(PointsSchemaError):
            load_trajectories(points_file(tmp_path, "traj_id,t,lat,lon\na,1.5,0,0\n"))

    def test_non_numeric_coordinate(self, tmp_path):
        with pytest.raises(PointsSchemaError) as excinfo:
            load_trajectories(points_file(tmp_path, "traj_id,t,lat,lon\na,0,0,0\na,1,north,0\n"))
        assert excinfo.value.row == 3

    def test_missing_column(self, tmp_path):
        with pytest.raises(PointsSchemaError):
            load_trajectories(points_file(tmp_path, "traj_id,t,lat\na,0,0\n"))

    def test_empty_file(self, tmp_path):
        with pytest.raises(PointsFileError):
            load_trajectories(points_file(tmp_path, ""))


class TestWriters:
    def test_trajectories_round_trip(self, tmp_path, small_synthetic):
        path = tmp_path / "points.csv"
        write_trajectories(path, small_synthetic)
        assert load_trajectories(path) == sorted(small_synthetic, key=lambda t: t.id)

    def test_object_column_only_when_needed(self, tmp_path, straight_track, make_track):
        plain = tmp_path / "plain.csv"
        write_trajectories(plain, [straight_track(3)])
        assert list(pd.read_csv(plain).columns) == ["traj_id", "t", "lat", "lon", "label"]

        grouped = tmp_path / "grouped.csv"
        traj = make_track("x", [0, 1], [0, 0], [0, 1], object_id="car")
        write_trajectories(grouped, [traj])
        assert "object_id" in pd.read_csv(grouped).columns
        assert load_trajectories(grouped)[0].object_id == "car"

    def test_error_signal_file(self, tmp_path):
        path = tmp_path / "errors.csv"
        write_error_signals(path, [ErrorSignal("a", 7, (3, 4), (1.5, 2.5))])
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["trajectory_id", "point_index", "error_m"]
        assert frame["point_index"].tolist() == [3, 4]

    def test_training_set_file(self, tmp_path):
        signal = ErrorSignal("a", 7, tuple(range(3, 12)), tuple(float(i) for i in range(9)))
        samples = build_training_set(signal, GroundTruthSplits("a", (5,)), 3)
        path = tmp_path / "training.csv"
        write_training_set(path, samples, 3)
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["trajectory_id", "start_index", "e1", "e2", "e3", "label"]
        assert len(frame) == len(samples)
        assert frame["label"].tolist() == [s.label for s in samples]

    def test_segments_file(self, tmp_path, straight_track):
        traj = straight_track(6, dt=30.0)
        path = tmp_path / "segments.csv"
        write_segments(path, [SegmentationResult.from_splits(traj.id, 6, [2])], [traj])
        frame = pd.read_csv(path)
        assert frame[["start_index", "end_index", "start_t", "end_t"]].values.tolist() == [[0, 2, 0, 60], [3, 5, 90, 150]]
