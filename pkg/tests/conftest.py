import numpy as np
import pytest

from fddrice.channel import ArrayGeometry, random_scenario, received, synth_channel
from fddrice.training import build_training, full_matrix


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def tensor_from_factors(b, cx, cy):
    """Triple-loop oracle: Y[m, ny * Nx + nx] = sum_f b[m,f] conj(cx[nx,f] cy[ny,f])."""
    m_r, k = b.shape
    n_x, n_y = cx.shape[0], cy.shape[0]
    y = np.zeros((m_r, n_x * n_y), dtype=complex)
    for m in range(m_r):
        for nx in range(n_x):
            for ny in range(n_y):
                y[m, ny * n_x + nx] = sum(b[m, f] * np.conj(cx[nx, f] * cy[ny, f]) for f in range(k))
    return y


def noiseless_setup(rng, m_r, l, k, m_x=10, m_y=10, min_sep=0.05):
    geom = ArrayGeometry(m_r, m_x, m_y)
    params = random_scenario(k, geom, rng, min_sep=min_sep)
    ts = build_training(geom, l, rng)
    h = synth_channel(params, geom)
    y = received(h, full_matrix(ts), np.inf)
    return geom, params, ts, h, y


def rel_err(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
