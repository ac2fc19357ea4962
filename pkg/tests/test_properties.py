"""Randomized invariants, driven by hypothesis-chosen seeds and sizes."""
import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from fddrice import mdalg
from fddrice.channel import (ArrayGeometry, MultipathParams, phase_distance, steering_ula,
                             synth_channel)
from fddrice.harness.metrics import match_paths
from fddrice.rice import FactorEstimate, factor_estimate, params_from_factors, plan_smoothing
from fddrice.ricer import RootSet, poly_coeffs, roots_inside, select_root
from fddrice.training import build_training, cri_check

from conftest import crandn, noiseless_setup, tensor_from_factors

pytestmark = pytest.mark.properties

seeds = st.integers(0, 2 ** 32 - 1)
phases = st.floats(-np.pi + 1e-6, np.pi - 1e-6)
FAST = settings(max_examples=100, deadline=None,
                suppress_health_check=[HealthCheck.too_slow])
SLOW = settings(max_examples=25, deadline=None,
                suppress_health_check=[HealthCheck.too_slow])


@FAST
@given(seeds, st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(1, 4),
       st.integers(1, 4))
def test_mixed_product(seed, p, q, r, t, k):
    rng = np.random.default_rng(seed)
    a, b = crandn(rng, p, r), crandn(rng, q, t)
    c, d = crandn(rng, p, k), crandn(rng, q, k)
    lhs = mdalg.kron(a, b).conj().T @ mdalg.khatri_rao(c, d)
    rhs = mdalg.khatri_rao(a.conj().T @ c, b.conj().T @ d)
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(rhs)


@FAST
@given(seeds, st.integers(2, 5), st.integers(1, 4), st.integers(1, 4), st.integers(1, 5))
def test_unfold_and_smoothing_oracle(seed, m_r, n_x, n_y, k):
    rng = np.random.default_rng(seed)
    b, cx, cy = crandn(rng, m_r, k), crandn(rng, n_x, k), crandn(rng, n_y, k)
    y = tensor_from_factors(b, cx, cy)
    scale = np.linalg.norm(y)
    assert np.linalg.norm(y - b @ mdalg.khatri_rao(cy, cx).conj().T) <= 1e-12 * scale
    y3 = mdalg.mode3_unfold(y, n_x, n_y)
    assert np.linalg.norm(y3 - mdalg.khatri_rao(cx.conj(), b) @ cy.conj().T) <= 1e-12 * scale
    y1 = mdalg.mode1_unfold(y, n_x, n_y)
    assert np.linalg.norm(y1 - mdalg.khatri_rao(cy.conj(), cx.conj()) @ b.T) <= 1e-12 * scale
    for p_r in range(2, m_r + 1):
        q_r = m_r + 1 - p_r
        z = mdalg.spatial_smooth(y3, p_r, q_r, n_x, m_r)
        ref = np.hstack([mdalg.khatri_rao(cx.conj(), b[i:i + p_r]) @ cy.conj().T
                         for i in range(q_r)])
        assert np.linalg.norm(z - ref) <= 1e-12 * max(scale, 1)


@FAST
@given(seeds, st.integers(3, 12), st.data())
def test_cri_identity(seed, m, data):
    rng = np.random.default_rng(seed)
    l = data.draw(st.integers(2, m))
    ts = build_training(ArrayGeometry(1, m, m), l, rng)
    w = data.draw(phases)
    assert cri_check(ts, w, "x") < 1e-12
    assert cri_check(ts, w, "y") < 1e-12


@FAST
@given(seeds, st.integers(2, 9))
def test_conjugate_reciprocal_roots(seed, m):
    rng = np.random.default_rng(seed)
    a = crandn(rng, m, m)
    # orthogonal projector onto a random subspace, as in the null-space cost
    q, _ = np.linalg.qr(a)
    keep = q[:, : int(rng.integers(1, m))]
    p = np.eye(m) - keep @ keep.conj().T
    c = poly_coeffs(p)
    np.testing.assert_allclose(c, c[::-1].conj(), atol=1e-12)
    rs = roots_inside(c)
    assert rs.inner.size == m - 1
    for z in rs.roots:
        assert np.min(np.abs(rs.roots - 1 / np.conj(z))) < 1e-6 * max(1, abs(z))


@FAST
@given(seeds, st.integers(1, 8), phases, phases)
def test_select_root_rotation(seed, n, guide, delta):
    rng = np.random.default_rng(seed)
    inner = rng.uniform(0.2, 0.99, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
    base = select_root(RootSet(np.array([]), inner), guide)
    rot = select_root(RootSet(np.array([]), inner * np.exp(1j * delta)), guide + delta)
    assert phase_distance(rot, base + delta) < 1e-9


@FAST
@given(seeds, st.integers(2, 7), st.integers(2, 7), st.integers(1, 3))
def test_svd_unitary_invariance(seed, p, q, k):
    rng = np.random.default_rng(seed)
    m = crandn(rng, p, q)
    k = min(k, p, q)
    u, _ = np.linalg.qr(crandn(rng, p, p))
    v, _ = np.linalg.qr(crandn(rng, q, q))
    s1 = mdalg.truncated_svd(m, k)[1]
    s2 = mdalg.truncated_svd(u @ m @ v, k)[1]
    assert np.max(np.abs(s1 - s2)) <= 1e-10 * s1[0]


@FAST
@given(phases, st.integers(2, 16))
def test_steering_shift(w, m):
    a = steering_ula(w, m)
    np.testing.assert_allclose(a[1:], a[:-1] * np.exp(1j * w), rtol=0, atol=1e-13)


@FAST
@given(seeds, st.integers(1, 4))
def test_channel_linear_in_gains(seed, k):
    rng = np.random.default_rng(seed)
    geom = ArrayGeometry(3, 4, 5)
    w = rng.uniform(-np.pi, np.pi, (3, k))
    b1, b2 = crandn(rng, k), crandn(rng, k)
    h = lambda b: synth_channel(MultipathParams(*w, b), geom)
    np.testing.assert_allclose(h(b1 + b2), h(b1) + h(b2), atol=1e-12)


@SLOW
@given(seeds, st.sampled_from([(3, 2, 4), (4, 2, 6), (4, 3, 5)]))
def test_rice_permutation_scaling_invariance(seed, case):
    m_r, l, k = case
    rng = np.random.default_rng(seed)
    geom, _, ts, _, y = noiseless_setup(rng, m_r, l, k, min_sep=0.1)
    f = factor_estimate(y, k, plan_smoothing(m_r, 2 * l, 2 * l), 2 * l, 2 * l)
    base = params_from_factors(f, ts)
    perm = rng.permutation(k)
    xx = crandn(rng, k)
    xy = crandn(rng, k)
    xr = 1 / np.conj(xx * xy)
    g = FactorEstimate(f.b_r[:, perm] * xr[perm], f.c_x[:, perm] * xx[perm],
                       f.c_y[:, perm] * xy[perm])
    m = match_paths(params_from_factors(g, ts), base)
    assert m.phase_errors.max() < 1e-9
    assert m.gain_errors.max() < 1e-8 * np.abs(base.beta).max()
