"""
Test Synthetic Generator
========================
"""

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from trajseg.generators.synthetic_generator import BEHAVIORS, SynthSpec, generate_synthetic
from trajseg.models.trajectory import KernelKind
from trajseg.services.error_signal_service import error_signal
from trajseg.services.geo_service import haversine_array
from trajseg.services.training_service import splits_from_labels
from trajseg.storage.csv_storage import write_trajectories


class TestSyntheticGenerator:
    def test_noiseless_single_behavior_is_predictable(self):
        spec = SynthSpec(
            seed=1,
            n_trajectories=3,
            segments_per_trajectory=(1, 1),
            points_per_segment=(30, 30),
            gps_noise_m=0.0,
            heading_jitter_deg=0.0,
            wander_step_m=0.0,
        )
        for traj in generate_synthetic(spec):
            assert error_signal(traj, 7, KernelKind.LINEAR).max_error() < 1.0

    def test_same_seed_same_file(self, tmp_path):
        spec = SynthSpec(seed=11, n_trajectories=4, points_per_segment=(10, 20))
        write_trajectories(tmp_path / "a.csv", generate_synthetic(spec))
        write_trajectories(tmp_path / "b.csv", generate_synthetic(spec))
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_different_seeds_differ(self):
        a = generate_synthetic(SynthSpec(seed=1, n_trajectories=2))
        b = generate_synthetic(SynthSpec(seed=2, n_trajectories=2))
        assert a != b

    def test_split_count_follows_segment_range(self):
        for traj in generate_synthetic(SynthSpec(seed=5, n_trajectories=10, points_per_segment=(10, 15))):
            assert 3 <= len(splits_from_labels(traj).split_indices) <= 7

    def test_labels_and_sampling(self):
        spec = SynthSpec(seed=8, n_trajectories=3, points_per_segment=(10, 12), sample_interval_s=5)
        for traj in generate_synthetic(spec):
            assert set(traj.labels) <= set(BEHAVIORS)
            assert traj.times[0] == spec.start_time
            assert set(traj.times[1:] - traj.times[:-1]) == {5.0}

    def test_ids_and_objects(self):
        trajectories = generate_synthetic(SynthSpec(seed=2, n_trajectories=5, trajectories_per_object=2))
        assert [t.id for t in trajectories] == ["traj000", "traj001", "traj002", "traj003", "traj004"]
        assert [t.object_id for t in trajectories] == ["obj000", "obj000", "obj001", "obj001", "obj002"]

    def test_behaviors_share_mean_speed(self):
        spec = SynthSpec(seed=42, n_trajectories=10, gps_noise_m=0.0)
        steps = {behavior: [] for behavior in BEHAVIORS}
        for traj in generate_synthetic(spec):
            lengths = haversine_array(traj.lats[:-1], traj.lons[:-1], traj.lats[1:], traj.lons[1:])
            for label, length in zip(traj.labels[1:], lengths):
                steps[label].append(length)
        directed, wander = np.mean(steps["directed"]), np.mean(steps["wander"])
        assert directed == pytest.approx(120.0, rel=0.02)
        assert wander == pytest.approx(directed, rel=0.1)

    @pytest.mark.parametrize("field, value", [
        ("points_per_segment", (5, 4)),
        ("segments_per_trajectory", (0, 3)),
        ("origin", (89.5, 0.0)),
        ("gps_noise_m", -1.0),
        ("n_trajectories", 0),
    ])
    def test_rejects_bad_settings(self, field, value):
        with pytest.raises(PydanticValidationError):
            SynthSpec(**{field: value})
