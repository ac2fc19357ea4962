"""Conjugate-flipped training sequences.

For an ``M``-element axis with symbol vector ``u`` and parameter ``L`` the
per-axis training matrix is ``[S_over | S_under]`` (``M x 2L``):

* column ``j`` of ``S_over`` is ``u[:M-l+1]`` padded with ``l-1`` zeros,
  ``l = L - j``;
* column ``j`` of ``S_under`` is the conjugated reversal of that nonzero part,
  padded the same way.

This makes ``S_under^H a = conj(S_over^H a) * a[M-L:]`` for every Vandermonde
``a``, which is what the closed-form phase estimate relies on. The full
sequence is ``S = S_y ⊗ S_x``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import mdalg
from .channel import ArrayGeometry, steering_ula


def axis_matrix(u: np.ndarray, l: int) -> np.ndarray:
    """Per-axis training matrix built from the symbol vector ``u``."""
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    s = np.zeros((m, 2 * l), dtype=complex)
    for j in range(l):
        n = m - (l - j) + 1
        s[:n, j] = u[:n]
        s[:n, l + j] = u[:n][::-1].conj()
    return s


@dataclass(frozen=True)
class TrainingSequence:
    s_x: np.ndarray
    s_y: np.ndarray
    l: int
    base_symbols: np.ndarray | None = None

    @property
    def n_x(self) -> int:
        return self.s_x.shape[1]

    @property
    def n_y(self) -> int:
        return self.s_y.shape[1]

    @property
    def n(self) -> int:
        return self.n_x * self.n_y

    def symbols(self, axis: str) -> np.ndarray:
        """Nonzero entries of the longest overline column for ``axis``."""
        return self._axis(axis)[:, self.l - 1]

    def over(self, axis: str) -> np.ndarray:
        return self._axis(axis)[:, : self.l]

    def under(self, axis: str) -> np.ndarray:
        return self._axis(axis)[:, self.l :]

    def _axis(self, axis: str) -> np.ndarray:
        if axis == "x":
            return self.s_x
        if axis == "y":
            return self.s_y
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")

    def constraint_product(self) -> complex:
        """Product of the last entries of the longest overline columns (designed to be 1)."""
        return complex(self.symbols("x")[-1] * self.symbols("y")[-1])

    def to_json(self) -> str:
        def enc(a):
            return None if a is None else np.stack([a.real, a.imag], axis=-1).tolist()
        return json.dumps({"l": self.l, "s_x": enc(self.s_x), "s_y": enc(self.s_y),
                           "base_symbols": enc(self.base_symbols)})

    @classmethod
    def from_json(cls, text: str) -> "TrainingSequence":
        doc = json.loads(text)

        def dec(v):
            if v is None:
                return None
            a = np.asarray(v, dtype=float)
            return a[..., 0] + 1j * a[..., 1]
        return cls(dec(doc["s_x"]), dec(doc["s_y"]), int(doc["l"]), dec(doc["base_symbols"]))


def _unit_symbols(n: int, rng: np.random.Generator) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(n))


def build_training(geom: ArrayGeometry, l: int, rng: np.random.Generator,
                   shared: bool = True) -> TrainingSequence:
    """Draw a training sequence for ``geom`` with ``N_x = N_y = 2l`` columns per axis.

    With ``shared=True`` both axes reuse one pool of ``max(m_x, m_y)``
    unit-modulus symbols; the shorter (or, on a tie, the y) axis takes a
    shifted window and ends with the reciprocal of the longer axis's last
    symbol so that the normalization product equals one. ``shared=False``
    draws each axis independently with the same closing reciprocal.
    """
    if l < 2:
        raise ValueError("l must be >= 2 (at least two overline columns are needed)")
    if min(geom.m_x, geom.m_y) < l:
        raise ValueError(f"array axes ({geom.m_x}, {geom.m_y}) shorter than l={l}")
    m_p, m_s = max(geom.m_x, geom.m_y), min(geom.m_x, geom.m_y)
    if shared:
        base = _unit_symbols(m_p, rng)
        u_p = base
        u_s = np.concatenate([base[m_p - m_s : m_p - 1], [1 / base[-1]]])
    else:
        base = None
        u_p = _unit_symbols(m_p, rng)
        u_s = _unit_symbols(m_s, rng)
        u_s[-1] = 1 / u_p[-1]
    if geom.m_x >= geom.m_y:
        u_x, u_y = u_p, u_s
    else:
        u_x, u_y = u_s, u_p
    return TrainingSequence(axis_matrix(u_x, l), axis_matrix(u_y, l), l, base)


def full_matrix(ts: TrainingSequence) -> np.ndarray:
    """The ``(m_x m_y) x (n_x n_y)`` training matrix ``S_y ⊗ S_x``."""
    return mdalg.kron(ts.s_y, ts.s_x)


def cri_check(ts: TrainingSequence, omega: float, axis: str) -> float:
    """Largest violation of ``s_under_l^H a = conj(s_over_l^H a) a_{M+1-l}`` over ``l``."""
    over, under = ts.over(axis), ts.under(axis)
    m = over.shape[0]
    a = steering_ula(omega, m)
    c_over = over.conj().T @ a
    c_under = under.conj().T @ a
    # column j pairs with l = L - j, i.e. element M - L + j (0-based)
    v = a[m - ts.l :]
    return float(np.max(np.abs(c_under - c_over.conj() * v)))


def min_overline_response(ts: TrainingSequence, omegas, axis: str) -> float:
    """Smallest ``|s_over^H a(w)|`` over the overline columns and given phases."""
    over = ts.over(axis)
    a = steering_ula(np.atleast_1d(omegas), over.shape[0])
    return float(np.min(np.abs(over.conj().T @ a)))
