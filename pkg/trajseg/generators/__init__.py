"""Synthetic data generators."""

from trajseg.generators.synthetic_generator import SynthSpec, generate_synthetic

__all__ = ["SynthSpec", "generate_synthetic"]
