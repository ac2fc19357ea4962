"""Dense multilinear algebra kernels shared by the estimators.

Index conventions (row-major numpy arrays, 0-based):

* A received block ``Y`` of shape ``(m_r, n_x * n_y)`` stores sample
  ``(n_x, n_y)`` in column ``n_y * n_x_total + n_x``, matching the row order
  of ``khatri_rao(C_y, C_x)``.
* The mode-3 unfolding has rows ``n_x * m_r + m`` and columns ``n_y``.
* The mode-1 unfolding has rows ``n_y * n_x_total + n_x`` and columns ``m``.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of two matrices."""
    return np.kron(np.atleast_2d(a), np.atleast_2d(b))


def khatri_rao(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Column-wise Kronecker product; column ``f`` is ``kron(a[:, f], b[:, f])``."""
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"khatri_rao needs equal column counts, got {a.shape[1]} and {b.shape[1]}"
        )
    return (a[:, None, :] * b[None, :, :]).reshape(a.shape[0] * b.shape[0], a.shape[1])


def _check_block(y: np.ndarray, n_x: int, n_y: int) -> np.ndarray:
    y = np.atleast_2d(np.asarray(y))
    if y.shape[1] != n_x * n_y:
        raise ValueError(f"expected {n_x * n_y} columns, got {y.shape[1]}")
    return y


def mode3_unfold(y: np.ndarray, n_x: int, n_y: int) -> np.ndarray:
    """Rearrange ``Y = B_r (C_y ⊙ C_x)^H`` into ``(C_x^* ⊙ B_r) C_y^H``.

    Output shape is ``(n_x * m_r, n_y)``.
    """
    y = _check_block(y, n_x, n_y)
    m_r = y.shape[0]
    # y[m, ny * n_x + nx] -> t[m, ny, nx]
    t = y.reshape(m_r, n_y, n_x)
    return t.transpose(2, 0, 1).reshape(n_x * m_r, n_y)


def mode1_unfold(y: np.ndarray, n_x: int, n_y: int) -> np.ndarray:
    """Rearrange ``Y`` into ``(C_y^* ⊙ C_x^*) B_r^T`` of shape ``(n_x * n_y, m_r)``."""
    y = _check_block(y, n_x, n_y)
    return y.T.copy()


def spatial_smooth(y3: np.ndarray, p_r: int, q_r: int, n_x: int, m_r: int) -> np.ndarray:
    """Stack ``q_r`` shifted row selections of the mode-3 unfolding.

    Block ``i`` keeps receive rows ``i .. i + p_r - 1`` inside every ``n_x``
    block, giving ``Z = (C_x^* ⊙ B_1)(B_2 ⊙ C_y^*)^T`` with shape
    ``(p_r * n_x, q_r * n_y)``. Column ``i * n_y + n_y_index`` holds shift ``i``.
    """
    if p_r + q_r != m_r + 1:
        raise ValueError(f"p_r + q_r must equal m_r + 1 ({p_r} + {q_r} != {m_r + 1})")
    if p_r < 2:
        raise ValueError("p_r must be at least 2")
    y3 = np.asarray(y3)
    if y3.shape[0] != n_x * m_r:
        raise ValueError(f"mode-3 unfolding must have {n_x * m_r} rows, got {y3.shape[0]}")
    n_y = y3.shape[1]
    blocks = y3.reshape(n_x, m_r, n_y)
    shifted = [blocks[:, i : i + p_r, :].reshape(n_x * p_r, n_y) for i in range(q_r)]
    return np.concatenate(shifted, axis=1)


def truncated_svd(m: np.ndarray, k: int):
    """Return the ``k`` dominant singular triplets ``(U_k, s_k, V_k)``.

    ``U_k @ diag(s_k) @ V_k.conj().T`` is the best rank-``k`` approximation.
    """
    m = np.atleast_2d(m)
    if k < 1 or k > min(m.shape):
        raise ValueError(f"k={k} outside 1..{min(m.shape)} for a {m.shape} matrix")
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    return u[:, :k], s[:k], vh[:k].conj().T


def left_eigenvectors(m: np.ndarray):
    """Eigenvalues ``lam`` and matrix ``T`` with ``T^H M = diag(lam) T^H``."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix required, got shape {m.shape}")
    lam, vl = scipy.linalg.eig(m, left=True, right=False)
    return vl, lam


def right_eigenvectors(m: np.ndarray):
    """Eigenvalues ``lam`` and matrix ``T`` with ``M T = T diag(lam)``."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix required, got shape {m.shape}")
    lam, vr = np.linalg.eig(m)
    return vr, lam


def pinv(m: np.ndarray, rcond: float = 1e-10) -> np.ndarray:
    """SVD pseudo-inverse with a cutoff relative to the largest singular value."""
    return np.linalg.pinv(m, rcond=rcond)
