"""Monte-Carlo experiment driver: sweeps, link simulation, presets and CLI."""
from .ber import run_ber
from .config import ExperimentConfig
from .metrics import match_paths, nmse
from .presets import preset, run_preset
from .sweep import SweepResult, TrialResult, run_sweep

__all__ = ["ExperimentConfig", "SweepResult", "TrialResult", "match_paths", "nmse",
           "preset", "run_ber", "run_preset", "run_sweep"]
