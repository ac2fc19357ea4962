import itertools

import numpy as np
import pytest

from fddrice.baselines import (AngleGrid, ls_benchmark_nmse, ls_orthogonal_estimate,
                               omp_estimate, orthogonal_training)
from fddrice.channel import ArrayGeometry, MultipathParams, random_scenario, received, synth_channel
from fddrice.harness.metrics import nmse
from fddrice.training import build_training, full_matrix

from conftest import crandn


def _on_grid(grid, geom, picks, beta):
    w_r = grid.receive_phases(geom.spacing_ratio)
    w_x, w_y = grid.transmit_phases(geom.spacing_ratio)
    r, t = zip(*picks)
    return MultipathParams(w_r[list(r)], w_x[list(t)], w_y[list(t)], beta)


@pytest.fixture
def setup():
    geom = ArrayGeometry(4, 10, 10)
    ts = build_training(geom, 2, np.random.default_rng(0))
    return geom, full_matrix(ts)


def test_grid_sizes():
    g = AngleGrid(7, 7, 7)
    assert g.n_atoms == 2 ** 21
    assert g.theta_r.size == 128
    assert g.transmit_phases()[0].size == 2 ** 14
    assert np.all(np.abs(AngleGrid(3, 3, 3).theta_r) < np.pi / 2)
    with pytest.raises(ValueError):
        AngleGrid(0, 1, 1)


def test_omp_single_on_grid_path(setup):
    geom, s = setup
    grid = AngleGrid(4, 4, 4)
    p = _on_grid(grid, geom, [(5, 77)], [0.8 - 0.3j])
    est = omp_estimate(synth_channel(p, geom) @ s, s, geom, grid, 1)
    np.testing.assert_allclose(est.omega_r, p.omega_r)
    np.testing.assert_allclose(est.omega_x, p.omega_x)
    assert abs(est.beta[0] - p.beta[0]) < 1e-8


def test_omp_two_paths_on_grid(setup):
    geom, s = setup
    grid = AngleGrid(4, 4, 4)
    p = _on_grid(grid, geom, [(2, 40), (12, 200)], [1.0, 0.7j])
    h = synth_channel(p, geom)
    est = omp_estimate(h @ s, s, geom, grid, 2)
    assert nmse(synth_channel(est, geom), h) < 1e-16
    assert sorted(est.omega_r) == sorted(p.omega_r)


def test_omp_selection_matches_exhaustive_oracle(setup):
    """First OMP pick equals the brute-force best normalized atom."""
    geom, s = setup
    grid = AngleGrid(3, 3, 3)
    rng = np.random.default_rng(4)
    y = synth_channel(random_scenario(2, geom, rng), geom) @ s
    w_r = grid.receive_phases()
    w_x, w_y = grid.transmit_phases()
    best, arg = -1.0, None
    for i, j in itertools.product(range(w_r.size), range(w_x.size)):
        atom = synth_channel(MultipathParams([w_r[i]], [w_x[j]], [w_y[j]], [1]), geom) @ s
        score = abs(np.vdot(atom, y)) / np.linalg.norm(atom)
        if score > best:
            best, arg = score, (w_r[i], w_x[j], w_y[j])
    est = omp_estimate(y, s, geom, grid, 1)
    np.testing.assert_allclose([est.omega_r[0], est.omega_x[0], est.omega_y[0]], arg)


def test_omp_residual_non_increasing(setup):
    geom, s = setup
    rng = np.random.default_rng(5)
    h = synth_channel(random_scenario(4, geom, rng), geom)
    y = received(h, s, 10, rng)
    res = [np.linalg.norm(y)]
    for k in range(1, 5):
        est = omp_estimate(y, s, geom, AngleGrid(), k)
        res.append(np.linalg.norm(y - synth_channel(est, geom) @ s))
    assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))


def test_omp_block_streaming_invariant(setup):
    geom, s = setup
    rng = np.random.default_rng(6)
    y = received(synth_channel(random_scenario(2, geom, rng), geom), s, 15, rng)
    a = omp_estimate(y, s, geom, AngleGrid(4, 4, 4), 2, block=37)
    b = omp_estimate(y, s, geom, AngleGrid(4, 4, 4), 2)
    np.testing.assert_array_equal(a.omega_x, b.omega_x)


def test_omp_rejects_k0(setup):
    geom, s = setup
    with pytest.raises(ValueError):
        omp_estimate(np.zeros((4, 16)), s, geom, AngleGrid(2, 2, 2), 0)


@pytest.mark.parametrize("snr,val", [(0, 1.0), (10, 0.1), (20, 0.01)])
def test_benchmark_formula(snr, val):
    assert ls_benchmark_nmse(snr) == pytest.approx(val)


def test_ls_orthogonal_noiseless_and_identity(rng):
    h = crandn(rng, 3, 16)
    s = orthogonal_training(16)
    np.testing.assert_allclose(ls_orthogonal_estimate(h @ s, s), h, atol=1e-12)
    y = crandn(rng, 3, 5)
    np.testing.assert_array_equal(ls_orthogonal_estimate(y, np.eye(5)), y)


def test_ls_orthogonal_rejects_non_orthogonal(rng):
    with pytest.raises(ValueError):
        ls_orthogonal_estimate(crandn(rng, 2, 4), crandn(rng, 4, 4))


def test_ls_orthogonal_statistics():
    rng = np.random.default_rng(7)
    geom = ArrayGeometry(4, 10, 10)
    s = orthogonal_training(100)
    cis = []
    for _ in range(3):
        h = synth_channel(random_scenario(4, geom, rng), geom)
        v = [nmse(ls_orthogonal_estimate(received(h, s, 10, rng), s), h) for _ in range(300)]
        m, se = np.mean(v), np.std(v) / np.sqrt(len(v))
        assert abs(m / 0.1 - 1) < 0.15
        cis.append((m - 1.96 * se, m + 1.96 * se))
    assert max(lo for lo, _ in cis) <= min(hi for _, hi in cis)
