"""Algebraic channel estimation from the structured training (RICE).

The received block is the matrix form of a rank-``K`` tensor with a
Vandermonde receive factor. Spatial smoothing plus an ESPRIT-style shift
invariance recovers the three factors; the conjugate-flip structure of the
training then yields the transmit phases in closed form, and a
forward/backward difference of the two longest training columns resolves
the factor scaling needed for the path gains.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import mdalg
from .channel import ArrayGeometry, MultipathParams, steering_ula, synth_channel
from .errors import IdentifiabilityError, RankDeficiencyError
from .training import TrainingSequence

log = logging.getLogger(__name__)

RANK_TOL = 1e-12
SMALL_OVERLINE = 1e-6


@dataclass(frozen=True)
class SmoothingPlan:
    p_r: int
    q_r: int
    k_max: int


@dataclass(frozen=True)
class FactorEstimate:
    """Factors with ``Y ≈ b_r (c_y ⊙ c_x)^H``, defined up to a joint column
    permutation and per-factor column scaling."""

    b_r: np.ndarray
    c_x: np.ndarray
    c_y: np.ndarray

    @property
    def k(self) -> int:
        return self.b_r.shape[1]

    def synthesize(self) -> np.ndarray:
        return self.b_r @ mdalg.khatri_rao(self.c_y, self.c_x).conj().T


def plan_smoothing(m_r: int, n_x: int, n_y: int) -> SmoothingPlan:
    """Split ``m_r + 1 = p_r + q_r`` maximizing ``min((p_r - 1) n_x, q_r n_y)``.

    Ties go to the smallest ``p_r``.
    """
    if m_r < 2:
        raise ValueError("smoothing needs at least two receive antennas")
    best = None
    for p in range(2, m_r + 1):
        q = m_r + 1 - p
        k_max = min((p - 1) * n_x, q * n_y)
        if best is None or k_max > best.k_max:
            best = SmoothingPlan(p, q, k_max)
    return best


def factor_estimate(y: np.ndarray, k: int, plan: SmoothingPlan, n_x: int, n_y: int) -> FactorEstimate:
    y = np.atleast_2d(y)
    m_r = y.shape[0]
    if k > plan.k_max:
        raise IdentifiabilityError(f"k={k} exceeds the identifiable maximum {plan.k_max}")
    if plan.p_r + plan.q_r != m_r + 1:
        raise ValueError("smoothing plan does not match the number of receive antennas")
    p, q = plan.p_r, plan.q_r

    z = mdalg.spatial_smooth(mdalg.mode3_unfold(y, n_x, n_y), p, q, n_x, m_r)
    # rows n_x_idx * p + p_idx  ->  p_idx * n_x + n_x_idx
    z_t = z.reshape(n_x, p, q * n_y).transpose(1, 0, 2).reshape(p * n_x, q * n_y)

    u_s, s, v = mdalg.truncated_svd(z_t, k)
    if s[0] == 0 or s[-1] / s[0] < RANK_TOL:
        raise RankDeficiencyError("smoothed data has rank below k; scenario not identifiable")

    u1 = u_s[: (p - 1) * n_x]
    u2 = u_s[n_x:]
    t, _ = mdalg.right_eigenvectors(mdalg.pinv(u1) @ u2)
    gamma1 = u_s @ t
    gamma2 = (np.linalg.solve(t, s[:, None] * v.conj().T)).T

    c_x = gamma1[:n_x].conj()
    c_y = gamma2[:n_y].conj()
    kr = mdalg.khatri_rao(c_y.conj(), c_x.conj())
    b_r = (mdalg.pinv(kr) @ mdalg.mode1_unfold(y, n_x, n_y)).T
    return FactorEstimate(b_r, c_x, c_y)


def shift_phase(v: np.ndarray) -> np.ndarray:
    """Per-column phase of ``v[:-1]^H v[1:]``."""
    v = np.asarray(v)
    if v.ndim == 1:
        v = v[:, None]
    return np.angle(np.sum(v[:-1].conj() * v[1:], axis=0))


def doa_phases(b_r: np.ndarray) -> np.ndarray:
    """Receive phases from the columns of the (scaled) receive factor."""
    b_r = np.asarray(b_r)
    if b_r.ndim == 1:
        b_r = b_r[:, None]
    if b_r.shape[0] < 2:
        raise ValueError("need at least two receive antennas")
    if np.any(np.linalg.norm(b_r, axis=0) == 0):
        raise ValueError("zero column in receive factor")
    return shift_phase(b_r)


def dod_phases_cri(c_hat: np.ndarray, l: int) -> np.ndarray:
    """Transmit phases of one axis from its estimated training response.

    Rows ``:l`` hold the overline responses and rows ``l:`` the underline
    ones. The element-wise ratio ``under / conj(over)`` reproduces the last
    ``l`` steering entries up to a unit-modulus factor, whose shift phase is
    the estimate.
    """
    c_hat = np.asarray(c_hat)
    if c_hat.ndim == 1:
        c_hat = c_hat[:, None]
    if c_hat.shape[0] != 2 * l:
        raise ValueError(f"expected {2 * l} rows, got {c_hat.shape[0]}")
    over, under = c_hat[:l], c_hat[l:]
    weak = np.min(np.abs(over), axis=0) < SMALL_OVERLINE * np.max(np.abs(c_hat), axis=0)
    if np.any(weak):
        log.warning("near-zero overline response in columns %s", np.flatnonzero(weak).tolist())
    with np.errstate(divide="ignore", invalid="ignore"):
        v = under / over.conj()
    return shift_phase(v)


def _axis_terms(c: np.ndarray, omega: np.ndarray, ts: TrainingSequence, axis: str):
    l = ts.l
    m = ts.s_x.shape[0] if axis == "x" else ts.s_y.shape[0]
    fwd = (c[l - 1] - c[l - 2]) * np.exp(-1j * (m - 1) * omega)
    bwd = c[2 * l - 1] - c[2 * l - 2] * np.exp(1j * omega)
    return fwd, bwd


def xi_product_forward(c_x, c_y, omega_x, omega_y, ts: TrainingSequence) -> np.ndarray:
    """``conj(xi_y xi_x)`` from the two longest overline columns.

    Symbol-free whenever the training satisfies the unit normalization
    product; the product is kept explicitly so the expression stays exact
    for any symbol draw.
    """
    fx, _ = _axis_terms(c_x, omega_x, ts, "x")
    fy, _ = _axis_terms(c_y, omega_y, ts, "y")
    return (fx * fy).conj() / ts.constraint_product()


def xi_product_backward(c_x, c_y, omega_x, omega_y, ts: TrainingSequence) -> np.ndarray:
    """``conj(xi_y xi_x)`` from the two longest underline columns."""
    _, bx = _axis_terms(c_x, omega_x, ts, "x")
    _, by = _axis_terms(c_y, omega_y, ts, "y")
    return (bx * by).conj() / np.conj(ts.constraint_product())


def pathloss_rice(factors: FactorEstimate, omegas, ts: TrainingSequence) -> np.ndarray:
    """Path gains ``xi_r * conj(xi_y xi_x)`` with the forward/backward average."""
    omega_r, omega_x, omega_y = (np.asarray(w) for w in omegas)
    m_r = factors.b_r.shape[0]
    a_r = steering_ula(omega_r, m_r)
    xi_r = np.sum(a_r.conj() * factors.b_r, axis=0) / m_r
    fwd = xi_product_forward(factors.c_x, factors.c_y, omega_x, omega_y, ts)
    bwd = xi_product_backward(factors.c_x, factors.c_y, omega_x, omega_y, ts)
    return xi_r * (fwd + bwd) / 2


def params_from_factors(factors: FactorEstimate, ts: TrainingSequence) -> MultipathParams:
    omega_r = doa_phases(factors.b_r)
    omega_x = dod_phases_cri(factors.c_x, ts.l)
    omega_y = dod_phases_cri(factors.c_y, ts.l)
    beta = pathloss_rice(factors, (omega_r, omega_x, omega_y), ts)
    return MultipathParams(omega_r, omega_x, omega_y, beta)


def rice_estimate(y: np.ndarray, k: int, ts: TrainingSequence, geom: ArrayGeometry) -> MultipathParams:
    """Estimate all path parameters from one training block.

    Paths come back in the estimator's internal order; use
    ``MultipathParams.sorted_by_omega_r`` for a canonical one.
    """
    plan = plan_smoothing(geom.m_r, ts.n_x, ts.n_y)
    factors = factor_estimate(y, k, plan, ts.n_x, ts.n_y)
    return params_from_factors(factors, ts)


def reconstruct_channel(params: MultipathParams, geom: ArrayGeometry) -> np.ndarray:
    return synth_channel(params, geom)
