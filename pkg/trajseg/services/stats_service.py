"""
Stats Service
=============
Mann-Whitney U test for comparing per-fold harmonic means.

Small tie-free samples (|a| + |b| <= 16) use the exact null distribution;
everything else uses the normal approximation with tie and continuity
corrections. p-values are two-sided.
"""

import logging
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import stats as scipy_stats

from trajseg.errors import EmptyInputError, ValidationError

logger = logging.getLogger(__name__)

EXACT_MAX_TOTAL = 16


class MannWhitneyResult(NamedTuple):
    u: float
    p_value: float


def choose_method(a: Sequence[float], b: Sequence[float]) -> str:
    pooled = np.concatenate([np.asarray(a, dtype=float), np.asarray(b, dtype=float)])
    has_ties = np.unique(pooled).size < pooled.size
    return "exact" if pooled.size <= EXACT_MAX_TOTAL and not has_ties else "asymptotic"


def mann_whitney_u(a: Sequence[float], b: Sequence[float], method: Optional[str] = None) -> MannWhitneyResult:
    """
    Two-sided Mann-Whitney U test.

    Args:
        a: First sample
        b: Second sample
        method: Force "exact" or "asymptotic"; chosen automatically when None

    Returns:
        (U of sample a, two-sided p-value). U counts pairs with a_i > b_j,
        ties counting one half.

    Raises:
        EmptyInputError: if either sample is empty
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise EmptyInputError("Mann-Whitney U needs two non-empty samples")

    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        # No variance at all: every ordering is equally likely
        return MannWhitneyResult(a.size * b.size / 2.0, 1.0)

    method = method or choose_method(a, b)
    if method not in ("exact", "asymptotic"):
        raise ValidationError(f"Unknown Mann-Whitney method '{method}'")

    result = scipy_stats.mannwhitneyu(a, b, alternative="two-sided", method=method, use_continuity=True)
    logger.debug(f"Mann-Whitney ({method}): U={result.statistic}, p={result.pvalue}")
    return MannWhitneyResult(float(result.statistic), float(min(1.0, result.pvalue)))
