"""Domain types: trajectories, error signals, segmentations, forests."""
