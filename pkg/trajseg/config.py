"""
Run configuration for the trajseg CLI.

All settings come from command-line flags; nothing is read from the
environment or from implicit files. RunConfig re-validates every
downstream constraint at parse time so a bad flag fails before any work
starts.

SEEDS:
One --seed drives everything. derive_seed() hashes "{seed}:{purpose}" to
give the fold shuffle and the forest independent sub-seeds. The synthetic
generator takes --seed as is.
"""

import hashlib
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from trajseg.models.forest import ForestParams
from trajseg.models.trajectory import KernelKind
from trajseg.services.error_signal_service import validate_window_size
from trajseg.services.training_service import validate_q

DEFAULT_SEED = 42
DEFAULT_WINDOW = 7
DEFAULT_Q = 7
DEFAULT_KERNEL = KernelKind.RANDOM_WALK
DEFAULT_FOLDS = 10

ALGORITHM_NAMES = ("wsii", "ows", "spd", "cbsmot")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def derive_seed(seed: int, purpose: str) -> int:
    """
    Independent 32-bit sub-seed for one stochastic component.

    Args:
        seed: Run seed (--seed)
        purpose: Component name, e.g. "folds" or "forest"

    Returns:
        Deterministic integer in [0, 2**32)
    """
    digest = hashlib.sha256(f"{seed}:{purpose}".encode()).hexdigest()
    return int(digest[:8], 16)


def setup_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Send log records to stderr; INFO by default."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


class RunConfig(BaseModel):
    """Validated flags shared by every subcommand."""

    model_config = ConfigDict(frozen=True)

    w: int = DEFAULT_WINDOW
    q: int = DEFAULT_Q
    kernel: KernelKind = DEFAULT_KERNEL
    forest: ForestParams = Field(default_factory=ForestParams)
    seed: int = DEFAULT_SEED
    folds: int = Field(DEFAULT_FOLDS, ge=2)
    algorithms: List[str] = Field(default_factory=lambda: list(ALGORITHM_NAMES))
    standardize: bool = False
    jobs: int = Field(1, ge=1)
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None

    @field_validator("w")
    @classmethod
    def _check_w(cls, value: int) -> int:
        return validate_window_size(value)

    @field_validator("q")
    @classmethod
    def _check_q(cls, value: int) -> int:
        return validate_q(value)

    @field_validator("kernel", mode="before")
    @classmethod
    def _parse_kernel(cls, value):
        return KernelKind.parse(value)

    @field_validator("algorithms", mode="before")
    @classmethod
    def _split_algorithms(cls, value):
        if isinstance(value, str):
            value = [name.strip() for name in value.split(",") if name.strip()]
        return value

    @field_validator("algorithms")
    @classmethod
    def _known_algorithms(cls, value: List[str]) -> List[str]:
        unknown = [name for name in value if name not in ALGORITHM_NAMES]
        if unknown:
            raise ValueError(f"unknown algorithm(s) {unknown}; choose from {', '.join(ALGORITHM_NAMES)}")
        if not value:
            raise ValueError("at least one algorithm is required")
        if len(set(value)) != len(value):
            raise ValueError("algorithms must not repeat")
        return value

    @model_validator(mode="after")
    def _features_fit_window(self) -> "RunConfig":
        self.forest.resolved_features_per_split(self.q)
        return self
