"""
Test Error Signal Service
=========================
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trajseg.errors import ValidationError
from trajseg.models.trajectory import KernelKind, TimedPoint, Trajectory
from trajseg.services.error_signal_service import error_signal, error_signals, validate_window_size, window_error
from trajseg.services.geo_service import EARTH_RADIUS_M


class TestWindowError:
    def test_collinear_linear_kernel_is_zero(self, straight_track):
        traj = straight_track(7)
        assert window_error(traj.points, KernelKind.LINEAR) == pytest.approx(0.0, abs=1e-6)

    def test_rest_random_walk_is_zero(self):
        window = [TimedPoint.at(10.0, 20.0, 10.0 * i) for i in range(7)]
        assert window_error(window, KernelKind.RANDOM_WALK) == 0.0

    def test_displaced_centre(self, straight_track):
        traj = straight_track(7)
        points = list(traj.points)
        centre = points[3]
        points[3] = TimedPoint.at(centre.lat + 0.001, centre.lon, centre.t)
        expected = EARTH_RADIUS_M * math.radians(0.001)
        assert window_error(points, KernelKind.LINEAR) == pytest.approx(expected, abs=0.5)
        assert expected == pytest.approx(111.2, abs=0.1)

    def test_rejects_even_or_short_windows(self, straight_track):
        with pytest.raises(ValidationError):
            window_error(straight_track(8).points, KernelKind.LINEAR)
        with pytest.raises(ValidationError):
            window_error(straight_track(5).points, KernelKind.LINEAR)


class TestErrorSignal:
    def test_twenty_six_points_give_twenty_values(self, straight_track):
        signal = error_signal(straight_track(26), 7, KernelKind.RANDOM_WALK)
        assert len(signal) == 20
        assert signal.indices == tuple(range(3, 23))
        assert signal.warning is None

    def test_single_window(self, straight_track):
        signal = error_signal(straight_track(7), 7, KernelKind.RANDOM_WALK)
        assert signal.indices == (3,)

    def test_short_trajectory_gives_empty_signal_with_warning(self, straight_track):
        signal = error_signal(straight_track(6), 7, KernelKind.RANDOM_WALK)
        assert len(signal) == 0
        assert signal.warning

    @pytest.mark.parametrize("w", [7, 9, 11])
    @pytest.mark.parametrize("n", [0, 3, 7, 12, 30])
    def test_signal_length(self, straight_track, w, n):
        signal = error_signal(straight_track(n), w, KernelKind.LINEAR)
        h = (w - 1) // 2
        assert len(signal) == max(0, n - w + 1)
        if n >= w:
            assert len(signal) == n - 2 * h
            assert signal.indices[0] == h
            assert signal.indices[-1] == n - h - 1

    def test_entries_match_window_error(self, make_track):
        rng = np.random.default_rng(0)
        n = 15
        traj = make_track("noisy", np.cumsum(rng.normal(50, 20, n)), rng.normal(0, 10, n), 5.0 * np.arange(n))
        signal = error_signal(traj, 7, KernelKind.KINEMATIC)
        for index, value in signal.entries:
            assert value == window_error(traj.points[index - 3:index + 4], KernelKind.KINEMATIC)
            assert value >= 0.0

    def test_linear_kernel_on_noiseless_line_is_zero(self, straight_track):
        signal = error_signal(straight_track(40, step_m=37.5, dt=3.0), 7, KernelKind.LINEAR)
        assert signal.max_error() < 1e-6

    def test_spike_is_measured(self, make_track):
        n = 21
        east = 50.0 * np.arange(n)
        north = np.zeros(n)
        north[10] = 80.0
        traj = make_track("spike", east, north, 10.0 * np.arange(n))
        signal = error_signal(traj, 7, KernelKind.LINEAR)
        assert signal.error_at(10) == pytest.approx(80.0, rel=0.05)

    @given(st.floats(min_value=-30.0, max_value=30.0))
    @settings(max_examples=25, deadline=None)
    def test_translation_invariance(self, shift):
        rng = np.random.default_rng(5)
        n = 12
        lats = 10.0 + np.cumsum(rng.normal(0, 1e-4, n))
        lons = 20.0 + np.cumsum(rng.normal(0, 1e-4, n))
        times = 10.0 * np.arange(n)
        base = error_signal(Trajectory.from_arrays("a", lats, lons, times), 7, KernelKind.LINEAR)
        moved = error_signal(Trajectory.from_arrays("a", lats, lons + shift, times), 7, KernelKind.LINEAR)
        for a, b in zip(base.values, moved.values):
            assert b == pytest.approx(a, rel=1e-3, abs=1e-6)

    def test_batch_is_ordered_by_id(self, straight_track):
        signals = error_signals([straight_track(9, traj_id="b"), straight_track(9, traj_id="a")], 7, "linear")
        assert [s.trajectory_id for s in signals] == ["a", "b"]


class TestValidateWindowSize:
    @pytest.mark.parametrize("w", [7, 9, 21])
    def test_accepts_odd(self, w):
        assert validate_window_size(w) == w

    @pytest.mark.parametrize("w", [5, 6, 8, 7.0, True, "7"])
    def test_rejects_bad_values(self, w):
        with pytest.raises(ValidationError):
            validate_window_size(w)
