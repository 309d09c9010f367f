"""
Test Benchmark
==============
Full 10-fold comparison on the default synthetic benchmark (seed 42,
30 trajectories, 5 m noise).
"""

from trajseg.generators.synthetic_generator import SynthSpec, generate_synthetic
from trajseg.services.algorithm_service import build_algorithm
from trajseg.services.evaluation_service import compare


def test_wsii_leads_on_default_benchmark():
    dataset = generate_synthetic(SynthSpec(seed=42, n_trajectories=30))
    algorithms = [build_algorithm(name) for name in ("wsii", "ows", "spd", "cbsmot")]
    report = compare(dataset, algorithms, k=10, seed=42)
    means = {r.algorithm: r.mean for r in report.reports}
    assert means["wsii"] >= 0.80, means
    for name in ("ows", "spd", "cbsmot"):
        assert means["wsii"] >= means[name], means
    assert len(report.pairwise) == 6
