import numpy as np
import pytest

from fddrice import mdalg
from fddrice.channel import ArrayGeometry, steering_ula
from fddrice.rice import shift_phase
from fddrice.training import (TrainingSequence, axis_matrix, build_training, cri_check,
                              full_matrix, min_overline_response)


def test_worked_example_pattern():
    """M_x = M_y = 5, L = 2: overline columns drop one trailing symbol each,
    underline columns are conjugated reversals, and the y axis closes with the
    reciprocal of the last x symbol."""
    ts = build_training(ArrayGeometry(1, 5, 5), 2, np.random.default_rng(0))
    s = ts.base_symbols
    sx, sy = ts.s_x, ts.s_y
    assert sx.shape == sy.shape == (5, 4)
    np.testing.assert_array_equal(sx[:, 0], np.r_[s[:4], 0])
    np.testing.assert_array_equal(sx[:, 1], s)
    np.testing.assert_array_equal(sx[:, 2], np.r_[s[:4][::-1].conj(), 0])
    np.testing.assert_array_equal(sx[:, 3], s[::-1].conj())
    u_y = np.r_[s[:4], 1 / s[4]]
    np.testing.assert_array_equal(sy[:, 1], u_y)
    np.testing.assert_array_equal(sy[:, 3], u_y[::-1].conj())
    assert abs(ts.constraint_product() - 1) < 1e-12


def test_unequal_axes_shared_window():
    ts = build_training(ArrayGeometry(1, 7, 5), 2, np.random.default_rng(1))
    s = ts.base_symbols
    assert s.shape == (7,)
    np.testing.assert_array_equal(ts.symbols("x"), s)
    np.testing.assert_array_equal(ts.symbols("y"), np.r_[s[2:6], 1 / s[6]])
    assert abs(ts.constraint_product() - 1) < 1e-12


def test_independent_draw_constraint():
    ts = build_training(ArrayGeometry(1, 6, 8), 3, np.random.default_rng(2), shared=False)
    assert ts.base_symbols is None
    assert abs(ts.constraint_product() - 1) < 1e-12


def test_zero_pattern_lower_anti_triangular():
    ts = build_training(ArrayGeometry(1, 8, 8), 3, np.random.default_rng(3))
    for half in (ts.over("x"), ts.under("x")):
        for j in range(3):
            zeros = 3 - j - 1
            assert np.all(half[8 - zeros:, j] == 0)
            assert np.all(half[: 8 - zeros, j] != 0)
    assert ts.n_x % 2 == 0 and ts.n == 36


def test_build_rejects_small_l_and_short_axis():
    with pytest.raises(ValueError):
        build_training(ArrayGeometry(1, 5, 5), 1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        build_training(ArrayGeometry(1, 2, 5), 3, np.random.default_rng(0))


def test_minimum_training_length():
    ts = build_training(ArrayGeometry(1, 2, 2), 2, np.random.default_rng(0))
    assert ts.n == 16


def test_full_matrix_dims_and_delegation():
    ts = build_training(ArrayGeometry(1, 5, 5), 2, np.random.default_rng(4))
    s = full_matrix(ts)
    assert s.shape == (25, 16)
    np.testing.assert_array_equal(s, mdalg.kron(ts.s_y, ts.s_x))
    assert np.all(np.abs(ts.base_symbols) > 0)


def test_cri_hand_example():
    s = axis_matrix(np.ones(3), 1)
    ts = TrainingSequence(s, s, 1)
    assert cri_check(ts, np.pi / 2, "x") < 1e-15
    assert cri_check(ts, 0.0, "x") < 1e-15


def test_cri_random_draws():
    rng = np.random.default_rng(5)
    for _ in range(100):
        m = int(rng.integers(3, 12))
        l = int(rng.integers(2, m + 1))
        ts = build_training(ArrayGeometry(1, m, m), l, rng)
        assert cri_check(ts, rng.uniform(-np.pi, np.pi), "x") < 1e-12


@pytest.mark.parametrize("omega", [-2.9, -0.4, 0.0, 1.1, 0.9 * np.pi])
def test_ratio_recovers_last_entries(omega):
    ts = build_training(ArrayGeometry(1, 10, 10), 3, np.random.default_rng(6))
    a = steering_ula(omega, 10)
    c_over = ts.over("x").conj().T @ a
    c_under = ts.under("x").conj().T @ a
    v = c_under / c_over.conj()
    np.testing.assert_allclose(v, a[7:], atol=1e-12)
    assert abs(shift_phase(v)[0] - omega) < 1e-10


def test_json_round_trip():
    ts = build_training(ArrayGeometry(1, 6, 4), 2, np.random.default_rng(7))
    back = TrainingSequence.from_json(ts.to_json())
    np.testing.assert_array_equal(back.s_x, ts.s_x)
    np.testing.assert_array_equal(back.s_y, ts.s_y)
    np.testing.assert_array_equal(back.base_symbols, ts.base_symbols)
    assert back.l == ts.l


def test_axis_name_validation():
    ts = build_training(ArrayGeometry(1, 4, 4), 2, np.random.default_rng(8))
    with pytest.raises(ValueError):
        ts.over("z")


def test_min_overline_response_positive():
    ts = build_training(ArrayGeometry(1, 10, 10), 2, np.random.default_rng(9))
    assert min_overline_response(ts, [0.1, 1.0], "y") > 0
