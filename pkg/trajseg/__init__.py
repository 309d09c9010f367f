"""
trajseg: supervised trajectory segmentation.

WS-II classifies sliding windows of an interpolation error signal with a
random forest and votes per point to place partitioning positions. OWS,
SPD and CB-SMoT baselines plus a k-fold purity/coverage protocol come
along for comparison.
"""

__version__ = "0.1.0"
