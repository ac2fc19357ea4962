"""Root-finding refinement of the transmit phases (RICER) and the
single-receive-antenna estimator.

For a transmit axis with training ``S`` and an estimated response ``c``
(proportional to ``S^H a(w)`` without noise), the quadratic form
``a(w)^H P a(w)`` with ``P = S (I - c c^H / |c|^2) S^H`` vanishes at the true
phase. Substituting ``z = e^{jw}`` gives a degree ``2M - 2`` polynomial whose
roots come in conjugate-reciprocal pairs; the root phase nearest the
closed-form estimate is kept.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mdalg
from .channel import ArrayGeometry, MultipathParams, phase_distance, steering_ula
from .errors import IdentifiabilityError, RankDeficiencyError
from .rice import (doa_phases, dod_phases_cri, factor_estimate, plan_smoothing,
                   shift_phase)
from .training import TrainingSequence, full_matrix

TRIM_TOL = 1e-14


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    inner: np.ndarray


def projector(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``S (I - Q Q^H) S^H`` for ``Q`` an orthonormal basis of ``span(c)``.

    ``c`` may be a vector or a matrix with orthonormal columns.
    """
    c = np.asarray(c)
    if c.ndim == 1:
        norm = np.linalg.norm(c)
        if norm == 0:
            raise ValueError("zero response vector")
        q = (c / norm)[:, None]
    else:
        q = c
    n = s.shape[1]
    if q.shape[0] != n:
        raise ValueError(f"response length {q.shape[0]} does not match {n} training columns")
    p = s @ (np.eye(n) - q @ q.conj().T) @ s.conj().T
    return (p + p.conj().T) / 2


def poly_coeffs(p_perp: np.ndarray) -> np.ndarray:
    """Coefficients (highest power first) of ``z^{M-1} a(z)^H P a(z)``.

    Entry ``i`` is the sum of the diagonal with offset ``M - 1 - i``, so
    evaluating at ``z = e^{jw}`` and multiplying by ``e^{-j(M-1)w}`` returns
    the quadratic form.
    """
    p_perp = np.asarray(p_perp)
    if p_perp.ndim != 2 or p_perp.shape[0] != p_perp.shape[1]:
        raise ValueError(f"square matrix required, got shape {p_perp.shape}")
    m = p_perp.shape[0]
    return np.array([np.trace(p_perp, offset=m - 1 - i) for i in range(2 * m - 1)])


def roots_inside(coeffs: np.ndarray) -> RootSet:
    """All polynomial roots (companion-matrix eigenvalues) and the inner half.

    The inner set is the ``M - 1`` roots of smallest modulus, which for a
    conjugate-reciprocal root set is exactly the roots with ``|z| <= 1``
    (pairs on the unit circle contribute one member each).
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        raise ValueError("all-zero polynomial")
    trimmed = coeffs.copy()
    trimmed[np.abs(trimmed) <= TRIM_TOL * scale] = 0
    roots = np.roots(trimmed)
    n_inner = (coeffs.shape[0] - 1) // 2
    order = np.argsort(np.abs(roots), kind="stable")
    return RootSet(roots, roots[order[:n_inner]])


def select_root(rs: RootSet, omega_guide: float) -> float:
    """Phase of the inner root closest (wrapped) to ``omega_guide``.

    Equal distances resolve toward the larger modulus.
    """
    if rs.inner.size == 0:
        raise ValueError("empty root set")
    psi = np.angle(rs.inner)
    d = phase_distance(psi, omega_guide)
    best = np.lexsort((-np.abs(rs.inner), d))[0]
    return float(psi[best])


def roots_nearest_circle(rs: RootSet, k: int) -> np.ndarray:
    """Phases of the ``k`` inner roots with the largest modulus, sorted by phase."""
    order = np.argsort(-np.abs(rs.inner), kind="stable")[:k]
    return np.sort(np.angle(rs.inner[order]))


def polish_phase(coeffs: np.ndarray, omega: float, iters: int = 4, max_step: float = 0.05) -> float:
    """Newton steps on the derivative of the cost ``a(w)^H P a(w)``.

    The true phase is a double root of the polynomial, which eigenvalue
    rooting only resolves to about ``sqrt(eps)``; the cost derivative has a
    simple zero there, so a few Newton steps restore full precision. Steps
    that are large, or taken where the cost is not locally convex, are
    rejected.
    """
    coeffs = np.asarray(coeffs)
    m = (coeffs.shape[0] + 1) // 2
    d = (m - 1) - np.arange(coeffs.shape[0])  # power of e^{jw} per entry
    for _ in range(iters):
        e = np.exp(1j * d * omega)
        g1 = np.real(np.sum(1j * d * coeffs * e))
        g2 = np.real(np.sum(-(d ** 2) * coeffs * e))
        if g2 <= 0:
            break
        step = g1 / g2
        if not np.isfinite(step) or abs(step) > max_step:
            break
        omega -= step
        if abs(step) < 1e-15:
            break
    return float(omega)


def root_phase(c: np.ndarray, s: np.ndarray, omega_guide: float) -> float:
    coeffs = poly_coeffs(projector(c, s))
    return polish_phase(coeffs, select_root(roots_inside(coeffs), omega_guide))


def grid_search_phase(c: np.ndarray, s: np.ndarray, points: int = 10_000) -> float:
    """Brute-force minimizer of ``a(w)^H P a(w)`` on a uniform phase grid."""
    p = projector(c, s)
    w = np.linspace(-np.pi, np.pi, points, endpoint=False)
    a = steering_ula(w, s.shape[0])
    cost = np.real(np.sum(a.conj() * (p @ a), axis=0))
    return float(w[np.argmin(cost)])


def pathloss_ls(y: np.ndarray, s_full: np.ndarray, a_r: np.ndarray,
                a_x: np.ndarray, a_y: np.ndarray) -> np.ndarray:
    """Least-squares gains for fixed steering matrices.

    ``vec(Y) = ((S^T conj(A_y ⊙ A_x)) ⊙ A_r) beta`` with column-major ``vec``.
    """
    design = design_matrix(s_full, a_r, a_x, a_y)
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise RankDeficiencyError("gain design matrix is rank deficient")
    beta, *_ = np.linalg.lstsq(design, np.asarray(y).reshape(-1, order="F"), rcond=None)
    return beta


def design_matrix(s_full, a_r, a_x, a_y) -> np.ndarray:
    g = s_full.T @ mdalg.khatri_rao(a_y, a_x).conj()
    return mdalg.khatri_rao(g, a_r)


def ricer_estimate(y: np.ndarray, k: int, ts: TrainingSequence, geom: ArrayGeometry) -> MultipathParams:
    plan = plan_smoothing(geom.m_r, ts.n_x, ts.n_y)
    factors = factor_estimate(y, k, plan, ts.n_x, ts.n_y)
    omega_r = doa_phases(factors.b_r)
    guide_x = dod_phases_cri(factors.c_x, ts.l)
    guide_y = dod_phases_cri(factors.c_y, ts.l)
    omega_x = np.array([root_phase(factors.c_x[:, i], ts.s_x, guide_x[i]) for i in range(k)])
    omega_y = np.array([root_phase(factors.c_y[:, i], ts.s_y, guide_y[i]) for i in range(k)])
    beta = pathloss_ls(y, full_matrix(ts),
                       steering_ula(omega_r, geom.m_r),
                       steering_ula(omega_x, geom.m_x),
                       steering_ula(omega_y, geom.m_y))
    return MultipathParams(omega_r, omega_x, omega_y, beta)


def single_antenna_estimate(y: np.ndarray, k: int, ts: TrainingSequence) -> MultipathParams:
    """Estimate ``K < min(N_x, N_y)`` paths from one receive antenna.

    The returned ``omega_r`` is zero for every path.
    """
    n_x, n_y = ts.n_x, ts.n_y
    if k >= min(n_x, n_y):
        raise IdentifiabilityError(f"k={k} must be below min(n_x, n_y)={min(n_x, n_y)}")
    y = np.asarray(y).reshape(-1)
    if y.shape[0] != n_x * n_y:
        raise ValueError(f"expected {n_x * n_y} samples, got {y.shape[0]}")
    m_x, m_y = ts.s_x.shape[0], ts.s_y.shape[0]

    # y[n_y * n_x_total + n_x] = sum_k conj(Cx[n_x,k] Cy[n_y,k]) beta_k
    y_mat = y.reshape(n_y, n_x).T.conj()  # = C_x diag(conj beta) C_y^T
    u_s, _, _ = mdalg.truncated_svd(y_mat, k)
    coeffs = poly_coeffs(projector(u_s, ts.s_x))
    omega_x = np.array([polish_phase(coeffs, w)
                        for w in roots_nearest_circle(roots_inside(coeffs), k)])

    c_x = ts.s_x.conj().T @ steering_ula(omega_x, m_x)
    c_y = (mdalg.pinv(c_x) @ y_mat).T
    omega_y = np.empty(k)
    for i in range(k):
        coeffs = poly_coeffs(projector(c_y[:, i], ts.s_y))
        omega_y[i] = polish_phase(coeffs, roots_nearest_circle(roots_inside(coeffs), 1)[0])

    c_y_hat = ts.s_y.conj().T @ steering_ula(omega_y, m_y)
    design = mdalg.khatri_rao(c_y_hat.conj(), c_x.conj())
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    return MultipathParams(np.zeros(k), omega_x, omega_y, beta)
