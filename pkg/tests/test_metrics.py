"""Norm evaluation, derivatives and the fundamental tensor for the built-ins."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslerhol.errors import CapabilityError, DegenerateInputError, DomainError
from finslerhol.metrics import (
    BryantShen,
    Euclidean,
    Funk,
    Scaled,
    directional_derivatives,
    eval_norm,
    eval_norm_squared,
    fundamental_tensor,
)

METRICS_3D = [
    Euclidean(3),
    Funk(3, sign=1),
    Funk(3, sign=-1),
    BryantShen(3, alpha=math.pi / 6),
    Scaled(Funk(3), 2.0),
]


def sample_xy(metric, rng, radius=0.5):
    x = rng.uniform(-radius / 2, radius / 2, size=metric.dim)
    y = rng.uniform(-1.0, 1.0, size=metric.dim)
    if np.linalg.norm(y) < 0.3:
        y = y + 0.7
    return x, y


def test_euclidean_norm_is_pythagorean():
    assert eval_norm(Euclidean(2), [0.3, -0.1], [3.0, 4.0]) == pytest.approx(5.0)


def test_funk_norm_at_origin_is_euclidean():
    rng = np.random.default_rng(0)
    for _ in range(5):
        y = rng.uniform(-1, 1, size=3)
        for sign in (1, -1):
            got = eval_norm(Funk(3, sign=sign), np.zeros(3), y)
            assert got == pytest.approx(np.linalg.norm(y), rel=1e-14)


def test_bryant_shen_norm_at_origin():
    rng = np.random.default_rng(1)
    for alpha in (math.pi / 6, math.pi / 4, -0.3):
        y = rng.uniform(-1, 1, size=3) + 0.1
        got = eval_norm(BryantShen(3, alpha=alpha), np.zeros(3), y)
        assert got == pytest.approx(np.linalg.norm(y) * math.cos(alpha), rel=1e-12)


def test_scaled_norm_is_exactly_factor_times_base():
    rng = np.random.default_rng(2)
    base = Funk(3)
    metric = Scaled(base, 2.0)
    for _ in range(5):
        x, y = sample_xy(base, rng)
        assert eval_norm(metric, x, y) == 2.0 * eval_norm(base, x, y)


@pytest.mark.parametrize("metric", METRICS_3D, ids=lambda m: type(m).__name__)
@pytest.mark.parametrize("t", [0.5, 2.0, 7.0])
def test_positive_homogeneity(metric, t):
    rng = np.random.default_rng(7)
    for _ in range(4):
        x, y = sample_xy(metric, rng)
        f1 = eval_norm(metric, x, y)
        ft = eval_norm(metric, x, t * y)
        assert ft == pytest.approx(t * f1, rel=1e-12)


@given(t=st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=25, deadline=None)
def test_funk_homogeneity_property(t):
    x = np.array([0.2, -0.1, 0.05])
    y = np.array([0.4, 0.8, -0.3])
    metric = Funk(3)
    assert eval_norm(metric, x, t * y) == pytest.approx(
        t * eval_norm(metric, x, y), rel=1e-12
    )


def test_funk_domain_guard():
    metric = Funk(2)
    with pytest.raises(DomainError):
        eval_norm(metric, [0.999999999, 0.0], [1.0, 0.0])
    with pytest.raises(DomainError):
        eval_norm(metric, [1.5, 0.0], [1.0, 0.0])


def test_zero_vector_rejected():
    with pytest.raises(DegenerateInputError):
        eval_norm(Euclidean(2), [0.0, 0.0], [0.0, 0.0])


def test_bryant_shen_parameter_guard():
    with pytest.raises(ValueError):
        BryantShen(3, alpha=2.0)
    with pytest.raises(ValueError):
        Scaled(Euclidean(3), factor=-1.0)
    with pytest.raises(ValueError):
        Funk(3, sign=0)


def test_unsupported_order_raises():
    with pytest.raises(CapabilityError):
        directional_derivatives(Euclidean(2), [0, 0], [1, 0], order_x=3, order_y=0)
    with pytest.raises(CapabilityError):
        directional_derivatives(Euclidean(2), [0, 0], [1, 0], order_x=0, order_y=4)


# ---------------------------------------------------------------------------
# derivative exactness against finite differences
# ---------------------------------------------------------------------------


def fd_gradient(fun, v, h=1e-5):
    out = np.empty(len(v))
    for i in range(len(v)):
        vp, vm = np.array(v, dtype=float), np.array(v, dtype=float)
        vp[i] += h
        vm[i] -= h
        d1 = (fun(vp) - fun(vm)) / (2 * h)
        vp[i] -= h / 2
        vm[i] += h / 2
        d2 = (fun(vp) - fun(vm)) / h
        out[i] = (4 * d2 - d1) / 3
    return out


def test_euclidean_derivatives_closed_form():
    metric = Euclidean(3)
    x = np.array([0.1, 0.2, -0.3])
    y = np.array([0.5, -1.0, 2.0])
    d = directional_derivatives(metric, x, y, order_x=1, order_y=1)
    np.testing.assert_allclose(d[(1, 0)], 0.0, atol=1e-15)
    np.testing.assert_allclose(d[(0, 1)], y / np.linalg.norm(y), rtol=1e-14)


def test_funk_x_derivative_matches_fd():
    metric = Funk(3)
    x = np.zeros(3)
    y = np.array([1.0, 0.0, 0.0])
    d = directional_derivatives(metric, x, y, order_x=1, order_y=0)
    expected = fd_gradient(lambda xv: eval_norm(metric, xv, y), x)
    np.testing.assert_allclose(d[(1, 0)], expected, rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("metric", METRICS_3D, ids=lambda m: type(m).__name__)
def test_all_first_derivatives_match_fd_on_random_grid(metric):
    rng = np.random.default_rng(11)
    for _ in range(3):
        x, y = sample_xy(metric, rng)
        d = directional_derivatives(metric, x, y, order_x=1, order_y=1)
        fx = fd_gradient(lambda xv: eval_norm(metric, xv, y), x)
        fy = fd_gradient(lambda yv: eval_norm(metric, x, yv), y)
        scale = max(1.0, np.max(np.abs(fx)), np.max(np.abs(fy)))
        np.testing.assert_allclose(d[(1, 0)], fx, rtol=1e-6, atol=1e-6 * scale)
        np.testing.assert_allclose(d[(0, 1)], fy, rtol=1e-6, atol=1e-6 * scale)


def test_second_y_derivative_matches_fd():
    metric = Funk(2)
    x = np.array([0.1, -0.2])
    y = np.array([0.9, 0.4])
    d = directional_derivatives(metric, x, y, order_x=0, order_y=2, squared=True)
    fd = np.empty((2, 2))
    for j in range(2):
        fd[j] = fd_gradient(
            lambda yv, j=j: directional_derivatives(
                metric, x, yv, order_x=0, order_y=1, squared=True
            )[(0, 1)][j],
            y,
        )
    np.testing.assert_allclose(d[(0, 2)], fd, rtol=1e-6)


# ---------------------------------------------------------------------------
# fundamental tensor
# ---------------------------------------------------------------------------


def test_fundamental_tensor_euclidean_is_identity():
    g = fundamental_tensor(Euclidean(3), [0.3, 0, 0], [0.2, -1.0, 0.4])
    np.testing.assert_allclose(g, np.eye(3), atol=1e-14)


def test_fundamental_tensor_funk_matches_fd_oracle():
    metric = Funk(2)
    x = np.zeros(2)
    y = np.array([1.0, 0.0])
    g = fundamental_tensor(metric, x, y)
    h = 1e-5
    fd = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            def f2(a, b):
                yy = y + a * np.eye(2)[i] + b * np.eye(2)[j]
                return eval_norm_squared(metric, x, yy)

            fd[i, j] = (
                f2(h, h) - f2(h, -h) - f2(-h, h) + f2(-h, -h)
            ) / (4 * h * h) / 2.0
    np.testing.assert_allclose(g, fd, rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("metric", METRICS_3D, ids=lambda m: type(m).__name__)
def test_fundamental_tensor_properties(metric):
    rng = np.random.default_rng(13)
    for _ in range(4):
        x, y = sample_xy(metric, rng)
        g = fundamental_tensor(metric, x, y)
        np.testing.assert_allclose(g, g.T, atol=1e-12)
        assert np.all(np.linalg.eigvalsh(g) > 0)
        # Euler identity g_ij y^i y^j = F^2
        f2 = eval_norm(metric, x, y) ** 2
        assert y @ g @ y == pytest.approx(f2, rel=1e-10)
        # zero-homogeneity in y
        for t in (0.5, 2.0, 7.0):
            gt = fundamental_tensor(metric, x, t * y)
            np.testing.assert_allclose(gt, g, rtol=1e-10, atol=1e-12)
