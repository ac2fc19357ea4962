"""Reference estimators: greedy sparse recovery over a quantized angle
dictionary, and least squares from an orthogonal training block."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mdalg
from .channel import ArrayGeometry, MultipathParams, steering_ula

# atoms per correlation block when streaming the transmit dictionary
BLOCK_ATOMS = 4096
ORTHO_TOL = 1e-10


def _midpoints(lo: float, hi: float, n: int) -> np.ndarray:
    step = (hi - lo) / n
    return lo + step * (np.arange(n) + 0.5)


@dataclass(frozen=True)
class AngleGrid:
    """Uniform midpoint grids over the DOA and the DOD azimuth/elevation.

    ``theta_r`` spans (-pi/2, pi/2), ``theta_t`` spans (-pi, pi) and ``phi_t``
    spans (0, pi/2), each with ``2**bits`` points.
    """

    bits_r: int = 5
    bits_t: int = 5
    bits_p: int = 5

    def __post_init__(self):
        if min(self.bits_r, self.bits_t, self.bits_p) < 1:
            raise ValueError("grid bit-widths must be >= 1")

    @property
    def theta_r(self) -> np.ndarray:
        return _midpoints(-np.pi / 2, np.pi / 2, 2 ** self.bits_r)

    @property
    def theta_t(self) -> np.ndarray:
        return _midpoints(-np.pi, np.pi, 2 ** self.bits_t)

    @property
    def phi_t(self) -> np.ndarray:
        return _midpoints(0.0, np.pi / 2, 2 ** self.bits_p)

    @property
    def n_atoms(self) -> int:
        return 2 ** (self.bits_r + self.bits_t + self.bits_p)

    def receive_phases(self, spacing_ratio: float = 0.5) -> np.ndarray:
        return 2 * np.pi * spacing_ratio * np.sin(self.theta_r)

    def transmit_phases(self, spacing_ratio: float = 0.5):
        """``(omega_x, omega_y)`` for every (theta_t, phi_t) pair, theta_t-major."""
        tt, pp = np.meshgrid(self.theta_t, self.phi_t, indexing="ij")
        c = 2 * np.pi * spacing_ratio
        return (c * np.sin(pp) * np.cos(tt)).ravel(), (c * np.sin(pp) * np.sin(tt)).ravel()


def _transmit_steering(omega_x, omega_y, geom: ArrayGeometry) -> np.ndarray:
    return mdalg.khatri_rao(steering_ula(omega_y, geom.m_y), steering_ula(omega_x, geom.m_x))


def _atom(a_r: np.ndarray, g_t: np.ndarray) -> np.ndarray:
    # vec(a_r a_t^H S), column-major, with g_t = S^T conj(a_t)
    return np.kron(g_t, a_r)


def omp_estimate(y: np.ndarray, s_full: np.ndarray, geom: ArrayGeometry,
                 grid: AngleGrid, k: int, block: int = BLOCK_ATOMS) -> MultipathParams:
    """Orthogonal matching pursuit with exactly ``k`` atoms.

    Atoms are ``vec(a_r(theta_r) a_t(theta_t, phi_t)^H S)``. The transmit part
    of the dictionary is streamed in blocks of ``block`` atoms, so memory stays
    bounded even for 7-bit grids. Each iteration refits all selected gains by
    least squares.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    y = np.atleast_2d(y)
    vec_y = y.reshape(-1, order="F")
    w_r = grid.receive_phases(geom.spacing_ratio)
    w_x, w_y = grid.transmit_phases(geom.spacing_ratio)
    a_r_all = steering_ula(w_r, geom.m_r)
    n_t = w_x.shape[0]

    support: list[tuple[int, int]] = []
    atoms: list[np.ndarray] = []
    residual = vec_y.copy()
    beta = np.zeros(0, dtype=complex)
    for _ in range(k):
        r = residual.reshape(y.shape, order="F")
        left = a_r_all.conj().T @ r @ s_full.conj().T  # (n_r, M_t)
        best = (-1.0, 0, 0)
        for start in range(0, n_t, block):
            stop = min(start + block, n_t)
            a_t = _transmit_steering(w_x[start:stop], w_y[start:stop], geom)
            norms = np.sqrt(geom.m_r) * np.linalg.norm(s_full.conj().T @ a_t, axis=0)
            with np.errstate(divide="ignore", invalid="ignore"):
                score = np.abs(left @ a_t) / norms
            score = np.nan_to_num(score, nan=0.0)
            idx = np.unravel_index(np.argmax(score), score.shape)
            if score[idx] > best[0]:
                best = (float(score[idx]), int(idx[0]), start + int(idx[1]))
        _, i_r, i_t = best
        support.append((i_r, i_t))
        a_t = _transmit_steering(w_x[i_t : i_t + 1], w_y[i_t : i_t + 1], geom)[:, 0]
        atoms.append(_atom(a_r_all[:, i_r], s_full.T @ a_t.conj()))
        design = np.stack(atoms, axis=1)
        beta, *_ = np.linalg.lstsq(design, vec_y, rcond=None)
        residual = vec_y - design @ beta

    i_r = np.array([s[0] for s in support])
    i_t = np.array([s[1] for s in support])
    return MultipathParams(w_r[i_r], w_x[i_t], w_y[i_t], beta)


def ls_benchmark_nmse(snr_db: float) -> float:
    """Best NMSE of least squares from square orthogonal training."""
    return float(10 ** (-snr_db / 10))


def orthogonal_training(m_t: int) -> np.ndarray:
    """Unitary DFT training block of size ``m_t x m_t``."""
    n = np.arange(m_t)
    return np.exp(-2j * np.pi * np.outer(n, n) / m_t) / np.sqrt(m_t)


def ls_orthogonal_estimate(y_orth: np.ndarray, s_orth: np.ndarray) -> np.ndarray:
    """Matched-filter estimate ``Y S^H``; ``S`` must satisfy ``S S^H = I``."""
    s_orth = np.atleast_2d(s_orth)
    gram = s_orth @ s_orth.conj().T
    if np.max(np.abs(gram - np.eye(s_orth.shape[0]))) > ORTHO_TOL:
        raise ValueError("training rows are not orthonormal")
    return np.atleast_2d(y_orth) @ s_orth.conj().T
