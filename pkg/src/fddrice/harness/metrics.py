"""Channel error metrics and permutation-aware path matching."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..channel import MultipathParams, phase_distance


def nmse(h_hat: np.ndarray, h: np.ndarray) -> float:
    """``||H_hat - H||_F^2 / ||H||_F^2`` for one realization."""
    h_hat = np.asarray(h_hat)
    h = np.asarray(h)
    if h_hat.shape != h.shape:
        raise ValueError(f"shape mismatch {h_hat.shape} vs {h.shape}")
    ref = np.linalg.norm(h) ** 2
    if ref == 0:
        raise ValueError("true channel is zero")
    return float(np.linalg.norm(h_hat - h) ** 2 / ref)


@dataclass(frozen=True)
class PathMatch:
    """``assignment[i]`` is the estimated path matched to true path ``i``.

    ``phase_errors`` has one row per true path with the wrapped errors in
    ``(omega_r, omega_x, omega_y)``; ``gain_errors`` are relative magnitudes.
    """

    assignment: np.ndarray
    phase_errors: np.ndarray
    gain_errors: np.ndarray


def match_paths(est: MultipathParams, truth: MultipathParams) -> PathMatch:
    """Minimum-cost bijection under summed wrapped phase distance."""
    if est.k != truth.k:
        raise ValueError(f"path count mismatch: {est.k} estimated vs {truth.k} true")
    cost = np.zeros((truth.k, est.k))
    for attr in ("omega_r", "omega_x", "omega_y"):
        cost += phase_distance(getattr(truth, attr)[:, None], getattr(est, attr)[None, :])
    rows, cols = linear_sum_assignment(cost)
    assignment = cols[np.argsort(rows)]
    errs = np.stack([phase_distance(getattr(est, a)[assignment], getattr(truth, a))
                     for a in ("omega_r", "omega_x", "omega_y")], axis=1)
    gain = np.abs(est.beta[assignment] - truth.beta) / np.abs(truth.beta)
    return PathMatch(assignment, errs, gain)
