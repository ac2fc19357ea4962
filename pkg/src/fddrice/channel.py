"""Multipath channel synthesis: steering vectors, channel matrices, noisy
training observations and random scenario generation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import mdalg


@dataclass(frozen=True)
class ArrayGeometry:
    """ULA at the mobile (``m_r`` elements) and ``m_x`` x ``m_y`` URA at the base station."""

    m_r: int
    m_x: int
    m_y: int
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if min(self.m_r, self.m_x, self.m_y) < 1:
            raise ValueError("antenna counts must be >= 1")
        if not 0.0 < self.spacing_ratio <= 0.5:
            raise ValueError("spacing_ratio must lie in (0, 0.5]")

    @property
    def m_t(self) -> int:
        return self.m_x * self.m_y


@dataclass(frozen=True)
class MultipathParams:
    """Per-path spatial phases (radians) and complex gains."""

    omega_r: np.ndarray
    omega_x: np.ndarray
    omega_y: np.ndarray
    beta: np.ndarray = field(repr=False)

    def __post_init__(self):
        arrays = [np.atleast_1d(np.asarray(a)) for a in
                  (self.omega_r, self.omega_x, self.omega_y)]
        beta = np.atleast_1d(np.asarray(self.beta, dtype=complex))
        for name, a in zip(("omega_r", "omega_x", "omega_y"), arrays):
            object.__setattr__(self, name, a.astype(float))
        object.__setattr__(self, "beta", beta)
        k = beta.shape[0]
        if k < 1 or any(a.shape != (k,) for a in arrays):
            raise ValueError("phase lists and gains must share one length >= 1")

    @property
    def k(self) -> int:
        return self.beta.shape[0]

    def permuted(self, order) -> "MultipathParams":
        order = np.asarray(order)
        return MultipathParams(self.omega_r[order], self.omega_x[order],
                               self.omega_y[order], self.beta[order])

    def sorted_by_omega_r(self) -> "MultipathParams":
        """Canonical ordering by receive phase, for feedback or display."""
        return self.permuted(np.argsort(self.omega_r, kind="stable"))


@dataclass(frozen=True)
class Scenario:
    geometry: ArrayGeometry
    params: MultipathParams
    snr_db: float
    seed: int


def wrap_phase(omega):
    """Map phases to ``[-pi, pi)``."""
    return (np.asarray(omega) + np.pi) % (2 * np.pi) - np.pi


def phase_distance(a, b):
    """Wrapped angular distance ``|(a - b + pi) mod 2pi - pi|``."""
    return np.abs(wrap_phase(np.asarray(a) - np.asarray(b)))


def steering_ula(omega, m: int) -> np.ndarray:
    """Vandermonde steering vector ``[1, e^{jw}, ..., e^{j(m-1)w}]``.

    A vector ``omega`` gives one column per phase.
    """
    omega = np.asarray(omega, dtype=float)
    idx = np.arange(m)
    if omega.ndim == 0:
        return np.exp(1j * idx * omega)
    return np.exp(1j * np.outer(idx, omega))


def steering_ura(omega_x, omega_y, geom: ArrayGeometry) -> np.ndarray:
    """URA steering vector ``a_y ⊗ a_x``; entry ``l_y * m_x + l_x`` is
    ``exp(j (l_x w_x + l_y w_y))``."""
    ax = steering_ula(omega_x, geom.m_x)
    ay = steering_ula(omega_y, geom.m_y)
    if ax.ndim == 1:
        return np.kron(ay, ax)
    return mdalg.khatri_rao(ay, ax)


def steering_matrices(params: MultipathParams, geom: ArrayGeometry):
    """``(A_r, A_x, A_y)`` with one column per path."""
    return (steering_ula(params.omega_r, geom.m_r),
            steering_ula(params.omega_x, geom.m_x),
            steering_ula(params.omega_y, geom.m_y))


def synth_channel(params: MultipathParams, geom: ArrayGeometry) -> np.ndarray:
    """``H = A_r diag(beta) A_t^H`` of shape ``(m_r, m_x * m_y)``."""
    a_r, a_x, a_y = steering_matrices(params, geom)
    a_t = mdalg.khatri_rao(a_y, a_x)
    return (a_r * params.beta) @ a_t.conj().T


def noise_variance(signal: np.ndarray, snr_db: float) -> float:
    """Per-entry noise variance giving ``snr_db`` against the mean signal power."""
    return float(np.mean(np.abs(signal) ** 2) / 10 ** (snr_db / 10))


def complex_noise(shape, variance: float, rng: np.random.Generator) -> np.ndarray:
    scale = np.sqrt(variance / 2)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def received(h: np.ndarray, s: np.ndarray, snr_db: float, rng: np.random.Generator | None = None,
             reference: str = "signal"):
    """Noisy training observation ``Y = H S + N``.

    With ``reference="signal"`` the noise variance is the mean power of
    ``H S`` divided by the SNR. ``reference="channel"`` instead divides the
    mean power of ``H``, i.e. the SNR is quoted per unit-power transmit
    symbol, independent of how much energy the training puts on each column.
    ``snr_db = inf`` disables the noise (and ``rng`` may be ``None``).
    """
    h = np.atleast_2d(h)
    s = np.atleast_2d(s)
    if h.shape[1] != s.shape[0]:
        raise ValueError(f"H has {h.shape[1]} columns but S has {s.shape[0]} rows")
    hs = h @ s
    if np.isposinf(snr_db):
        return hs
    if rng is None:
        raise ValueError("an RNG is required when noise is enabled")
    if reference == "signal":
        var = noise_variance(hs, snr_db)
    elif reference == "channel":
        var = noise_variance(h, snr_db)
    else:
        raise ValueError(f"reference must be 'signal' or 'channel', got {reference!r}")
    return hs + complex_noise(hs.shape, var, rng)


def rician_gains(k: int, rng: np.random.Generator, k_factor_db: float = 10.0) -> np.ndarray:
    """Unit-mean-power Rician gains with uniformly distributed phase."""
    kf = 10 ** (k_factor_db / 10)
    los = np.sqrt(kf / (kf + 1)) * np.exp(2j * np.pi * rng.random(k))
    nlos = np.sqrt(1 / (kf + 1)) * complex_noise(k, 1.0, rng)
    return los + nlos


# Fixed phase ranges for the K-sweep and M_r-sweep grid scenarios.
GRID_RANGES = {
    "r": (0.4 * np.pi, 1.6 * np.pi),
    "x": (0.4 * np.pi, 1.8 * np.pi),
    "y": (0.2 * np.pi, 1.6 * np.pi),
}


def grid_phases(k: int, lo: float, hi: float) -> np.ndarray:
    """``k`` evenly spaced phases over ``[lo, hi]`` (endpoints included), wrapped."""
    if k == 1:
        return wrap_phase(np.array([lo]))
    return wrap_phase(np.linspace(lo, hi, k))


def _separated_phases(k: int, rng: np.random.Generator, min_sep: float,
                      max_tries: int = 1000) -> np.ndarray:
    if k * min_sep > 2 * np.pi:
        raise ValueError(f"cannot place {k} phases with separation {min_sep} on the circle")
    for _ in range(max_tries):
        w = rng.uniform(-np.pi, np.pi, k)
        if k == 1:
            return w
        d = phase_distance(w[:, None], w[None, :])
        if d[~np.eye(k, dtype=bool)].min() >= min_sep:
            return w
    raise ValueError(f"no admissible phase draw for k={k}, min_sep={min_sep}")


def random_scenario(k: int, geom: ArrayGeometry, rng: np.random.Generator,
                    min_sep: float = 0.05, mode: str = "random",
                    k_factor_db: float = 10.0) -> MultipathParams:
    """Draw multipath parameters.

    ``mode="grid"`` spreads the phases evenly over the fixed ranges in
    ``GRID_RANGES``; ``mode="random"`` draws uniform phases with pairwise
    wrapped separation at least ``min_sep`` in every dimension. Gains are
    Rician in both modes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if mode == "grid":
        phases = [grid_phases(k, *GRID_RANGES[a]) for a in "rxy"]
        for w in phases:
            if k > 1:
                d = phase_distance(w[:, None], w[None, :])
                if d[~np.eye(k, dtype=bool)].min() < min_sep:
                    raise ValueError(f"grid for k={k} violates min_sep={min_sep}")
    elif mode == "random":
        phases = [_separated_phases(k, rng, min_sep) for _ in range(3)]
    else:
        raise ValueError(f"unknown scenario mode {mode!r}")
    beta = rician_gains(k, rng, k_factor_db)
    return MultipathParams(phases[0], phases[1], phases[2], beta)


def phases_to_angles(params: MultipathParams, spacing_ratio: float = 0.5):
    """Convert spatial phases to ``(theta_r, theta_t, phi_t)`` in radians.

    ``theta_r`` is the DOA, ``theta_t``/``phi_t`` the azimuth/elevation of the DOD.
    """
    scale = 1.0 / (2 * np.pi * spacing_ratio)
    ur = params.omega_r * scale
    ux = params.omega_x * scale
    uy = params.omega_y * scale
    ut = np.hypot(ux, uy)
    if np.any(np.abs(ur) > 1 + 1e-12) or np.any(ut > 1 + 1e-12):
        raise ValueError("phases outside the invertible range for this spacing")
    theta_r = np.arcsin(np.clip(ur, -1, 1))
    theta_t = np.arctan2(uy, ux)
    phi_t = np.arcsin(np.clip(ut, 0, 1))
    return theta_r, theta_t, phi_t


def angles_to_phases(theta_r, theta_t, phi_t, beta, spacing_ratio: float = 0.5) -> MultipathParams:
    c = 2 * np.pi * spacing_ratio
    theta_r, theta_t, phi_t = (np.asarray(a, dtype=float) for a in (theta_r, theta_t, phi_t))
    return MultipathParams(c * np.sin(theta_r),
                           c * np.sin(phi_t) * np.cos(theta_t),
                           c * np.sin(phi_t) * np.sin(theta_t),
                           beta)
