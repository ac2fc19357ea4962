"""NMSE sweeps over SNR, path count or receive-array size."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field

import numpy as np

from ..baselines import ls_benchmark_nmse
from .config import ExperimentConfig
from .metrics import match_paths, nmse
from .trial import PARAMETRIC, draw_trial, timed_estimate, trial_seed

log = logging.getLogger(__name__)

SWEEP_HEADER = ["sweep_value", "estimator", "nmse_mean", "nmse_median",
                "param_err_median", "failures", "trials", "seconds"]


@dataclass
class TrialResult:
    """Per-estimator outcome of one trial; ``nmse`` is NaN for a failure.

    ``phase_errors[name]`` holds one row of wrapped ``(omega_r, omega_x,
    omega_y)`` errors per true path after matching.
    """

    trial: int
    seed: tuple
    nmse: dict[str, float] = field(default_factory=dict)
    phase_errors: dict[str, np.ndarray] = field(default_factory=dict)
    seconds: dict[str, float] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)


@dataclass
class PointResult:
    value: float
    k: int
    snr_db: float
    trials: list[TrialResult]


@dataclass
class SweepResult:
    config: ExperimentConfig
    points: list[PointResult]

    def nmse_values(self, point: int, estimator: str) -> np.ndarray:
        """Successful per-trial NMSE values at one point."""
        v = np.array([t.nmse.get(estimator, np.nan) for t in self.points[point].trials])
        return v[np.isfinite(v)]

    def phase_errors(self, point: int, estimator: str) -> np.ndarray:
        """Stacked matched phase errors (paths x 3) from all successful trials."""
        rows = [t.phase_errors[estimator] for t in self.points[point].trials
                if estimator in t.phase_errors]
        return np.concatenate(rows) if rows else np.zeros((0, 3))

    def failures(self, point: int, estimator: str) -> int:
        return sum(estimator in t.errors for t in self.points[point].trials)

    def any_point_all_failed(self) -> bool:
        return any(self.failures(i, e) == len(p.trials)
                   for i, p in enumerate(self.points)
                   for e in self.config.estimators if e != "benchmark")

    def rows(self) -> list[list[str]]:
        out = []
        for i, p in enumerate(self.points):
            n = len(p.trials)
            for e in self.config.estimators:
                if e == "benchmark":
                    b = ls_benchmark_nmse(p.snr_db)
                    out.append([_num(p.value), e, _f(b), _f(b), "", "0", str(n), ""])
                    continue
                v = self.nmse_values(i, e)
                pe = self.phase_errors(i, e)
                secs = sum(t.seconds.get(e, 0.0) for t in p.trials)
                out.append([
                    _num(p.value), e,
                    _f(np.mean(v)) if v.size else "nan",
                    _f(np.median(v)) if v.size else "nan",
                    _f(np.median(pe.max(axis=1))) if pe.size else "",
                    str(self.failures(i, e)), str(n),
                    _f(secs) if self.config.timing else "",
                ])
        return out

    def to_csv(self) -> str:
        return format_csv(SWEEP_HEADER, self.rows())


def _f(x: float) -> str:
    return f"{float(x):.6e}"


def _num(x) -> str:
    return f"{float(x):g}"


def format_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def run_trial(cfg: ExperimentConfig, point: int, trial: int, value) -> TrialResult:
    geom, k, snr_db = cfg.point(value)
    seed = trial_seed(cfg.seed, point, trial)
    td = draw_trial(cfg, geom, k, snr_db, seed)
    res = TrialResult(trial, tuple(seed.entropy))
    for name in cfg.estimators:
        if name == "benchmark":
            continue
        h_hat, p, secs, err = timed_estimate(name, td, k, cfg.omp_bits)
        res.seconds[name] = secs
        if err is not None:
            res.errors[name] = err
            res.nmse[name] = float("nan")
            continue
        res.nmse[name] = nmse(h_hat, td.h)
        if name in PARAMETRIC:
            res.phase_errors[name] = match_paths(p, td.params).phase_errors
    return res


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Run every trial of every sweep point, in sweep order.

    Trial ``t`` at point ``i`` draws all of its randomness from
    ``SeedSequence([seed, i, t])``, so results do not depend on execution
    order and any single trial can be replayed in isolation.
    """
    points = []
    for i, value in enumerate(cfg.sweep_values):
        _, k, snr_db = cfg.point(value)
        trials = [run_trial(cfg, i, t, value) for t in range(cfg.trials)]
        for e in cfg.estimators:
            n_fail = sum(e in t.errors for t in trials)
            if n_fail:
                first = next(t.errors[e] for t in trials if e in t.errors)
                log.warning("%s failed in %d/%d trials at %s=%s (%s)",
                            e, n_fail, len(trials), cfg.sweep_axis, value, first)
        points.append(PointResult(float(value), k, snr_db, trials))
    return SweepResult(cfg, points)
