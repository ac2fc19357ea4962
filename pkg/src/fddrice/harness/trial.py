"""One Monte-Carlo trial: draw a scenario, observe it, run the estimators."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..baselines import AngleGrid, ls_orthogonal_estimate, omp_estimate, orthogonal_training
from ..channel import (ArrayGeometry, MultipathParams, random_scenario, received,
                       rician_gains, synth_channel)
from ..errors import IdentifiabilityError, RankDeficiencyError
from ..rice import rice_estimate
from ..ricer import ricer_estimate
from ..training import TrainingSequence, build_training, full_matrix, min_overline_response
from .config import PHASE_TABLES, ExperimentConfig

# below this |s_over^H a| the closed-form phase step divides by ~0
MIN_OVERLINE = 1e-6
MAX_REDRAWS = 100
# estimators that return path parameters (the others give a channel only)
PARAMETRIC = ("rice", "ricer", "omp")
ESTIMATION_ERRORS = (IdentifiabilityError, RankDeficiencyError, np.linalg.LinAlgError)


def trial_seed(master: int, point: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(master), int(point), int(trial)])


@dataclass
class TrialData:
    geometry: ArrayGeometry
    params: MultipathParams
    training: TrainingSequence
    s_full: np.ndarray
    h: np.ndarray
    y: np.ndarray
    snr_db: float
    snr_reference: str
    aux_rng: np.random.Generator  # orthogonal-LS noise
    data_rng: np.random.Generator  # payload bits and noise for link simulation


def draw_params(cfg: ExperimentConfig, geom: ArrayGeometry, k: int,
                rng: np.random.Generator) -> MultipathParams:
    if cfg.scenario == "paper-fixed":
        table = np.pi * PHASE_TABLES[cfg.phase_table]
        return MultipathParams(table[0], table[1], table[2],
                               rician_gains(table.shape[1], rng, cfg.k_factor_db))
    return random_scenario(k, geom, rng, cfg.min_sep, cfg.scenario, cfg.k_factor_db)


def draw_training(geom: ArrayGeometry, l: int, params: MultipathParams,
                  rng: np.random.Generator) -> TrainingSequence:
    """Training whose overline responses to the true paths are all non-negligible."""
    for _ in range(MAX_REDRAWS):
        ts = build_training(geom, l, rng)
        if (min_overline_response(ts, params.omega_x, "x") >= MIN_OVERLINE
                and min_overline_response(ts, params.omega_y, "y") >= MIN_OVERLINE):
            return ts
    raise RankDeficiencyError("no training draw avoided a vanishing overline response")


def draw_trial(cfg: ExperimentConfig, geom: ArrayGeometry, k: int, snr_db: float,
               seed: np.random.SeedSequence) -> TrialData:
    main, aux, data = (np.random.default_rng(s) for s in seed.spawn(3))
    params = draw_params(cfg, geom, k, main)
    ts = draw_training(geom, cfg.l, params, main)
    s_full = full_matrix(ts)
    h = synth_channel(params, geom)
    y = received(h, s_full, snr_db, main, cfg.snr_reference)
    return TrialData(geom, params, ts, s_full, h, y, snr_db, cfg.snr_reference, aux, data)


def estimate(name: str, td: TrialData, k: int, omp_bits: int = 5):
    """Run one estimator; returns ``(h_hat, params_or_None)``."""
    geom = td.geometry
    if name == "rice":
        p = rice_estimate(td.y, k, td.training, geom)
    elif name == "ricer":
        p = ricer_estimate(td.y, k, td.training, geom)
    elif name == "omp":
        p = omp_estimate(td.y, td.s_full, geom, AngleGrid(omp_bits, omp_bits, omp_bits), k)
    elif name == "ls":
        s_orth = orthogonal_training(geom.m_t)
        y_orth = received(td.h, s_orth, td.snr_db, td.aux_rng, td.snr_reference)
        return ls_orthogonal_estimate(y_orth, s_orth), None
    elif name == "genie":
        return td.h.copy(), None
    else:
        raise ValueError(f"estimator {name!r} does not produce a channel")
    return synth_channel(p, geom), p


def timed_estimate(name: str, td: TrialData, k: int, omp_bits: int = 5):
    """Like :func:`estimate` but returns ``(h_hat, params, seconds, error)``.

    Estimation failures (identifiability, rank deficiency, LAPACK errors) are
    captured rather than raised.
    """
    t0 = time.perf_counter()
    try:
        h_hat, p = estimate(name, td, k, omp_bits)
        err = None
    except ESTIMATION_ERRORS as exc:
        h_hat, p, err = None, None, f"{type(exc).__name__}: {exc}"
    return h_hat, p, time.perf_counter() - t0, err
