"""
Metrics report writer for `evaluate` and `compare`.

JSON with sorted keys and two-space indentation. No timestamps or host
details go in, so identical runs give byte-identical files.
"""

import json
import logging
from pathlib import Path
from typing import Union

from trajseg.services.evaluation_service import ComparisonReport

logger = logging.getLogger(__name__)


def report_to_dict(report: ComparisonReport) -> dict:
    return {
        "folds": report.k,
        "seed": report.seed,
        "tuning_fold": report.plan.tuning_fold,
        "fold_assignment": dict(sorted(report.plan.assignment.items())),
        "algorithm_order": [r.algorithm for r in report.reports],
        "algorithms": {
            r.algorithm: {
                "test_folds": list(r.folds),
                "fold_harmonic_means": list(r.fold_means),
                "mean_harmonic": r.mean,
                "std_harmonic": r.std,
                "parameters": r.parameters,
            }
            for r in report.reports
        },
        "pairwise": [
            {"a": test.a, "b": test.b, "u": test.u, "p_value": test.p_value}
            for test in report.pairwise
        ],
    }


def write_report(path: Union[str, Path], report: ComparisonReport) -> None:
    Path(path).write_text(json.dumps(report_to_dict(report), sort_keys=True, indent=2) + "\n")
    logger.info(f"💾 Wrote metrics report to {path}")
