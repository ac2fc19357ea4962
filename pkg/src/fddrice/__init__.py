"""Downlink channel estimation for FDD massive MIMO from structured training.

The training design makes the received block a low-rank tensor with a
Vandermonde factor; :mod:`fddrice.rice` factors it algebraically and
:mod:`fddrice.ricer` refines the transmit phases by polynomial rooting.
"""
from .channel import ArrayGeometry, MultipathParams, random_scenario, received, synth_channel
from .errors import ConfigError, IdentifiabilityError, RankDeficiencyError
from .rice import plan_smoothing, rice_estimate
from .ricer import ricer_estimate, single_antenna_estimate
from .training import TrainingSequence, build_training, full_matrix

__version__ = "0.1.0"
__all__ = [
    "ArrayGeometry", "ConfigError", "IdentifiabilityError", "MultipathParams",
    "RankDeficiencyError", "TrainingSequence", "build_training", "full_matrix",
    "plan_smoothing", "random_scenario", "received", "rice_estimate", "ricer_estimate",
    "single_antenna_estimate", "synth_channel",
]
