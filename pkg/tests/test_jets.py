"""Jet arithmetic against Richardson-extrapolated finite differences."""

import numpy as np
import pytest

from finslerhol.jets import space_for


def _sqrt(z):
    return z.sqrt() if hasattr(z, "sqrt") else np.sqrt(z)


def f_scalar(x, y):
    # smooth test function mixing both variable groups, sqrt and division
    s = x[0] * x[0] + y[0] * y[1] + 0.3 * x[1] * y[0]
    q = 2.0 + x[1] * y[1]
    r = 1.5 + x[0] * y[0] * y[0]
    return (s * s + 1.0) / q + _sqrt(r)


def f_plain(xv, yv):
    return f_scalar(list(xv), list(yv))


def central_diff(fun, h):
    return (fun(h) - fun(-h)) / (2 * h)


def richardson(fun, h):
    d1 = central_diff(fun, h)
    d2 = central_diff(fun, h / 2)
    return (4 * d2 - d1) / 3


@pytest.fixture
def point():
    rng = np.random.default_rng(42)
    return rng.uniform(-0.4, 0.4, size=2), rng.uniform(0.5, 1.2, size=2)


def test_value_matches_plain_eval(point):
    xv, yv = point
    space = space_for(2, 2, 3, 5)
    xs, ys = space.lift(xv, yv)
    jet = f_scalar(xs, ys)
    assert jet.value == pytest.approx(f_plain(xv, yv), rel=1e-14)


def test_first_derivatives_match_fd(point):
    xv, yv = point
    space = space_for(2, 2, 3, 5)
    xs, ys = space.lift(xv, yv)
    jet = f_scalar(xs, ys)
    for i in range(2):
        def shift_x(h, i=i):
            xp = xv.copy()
            xp[i] += h
            return f_plain(xp, yv)

        assert jet.deriv_x(i) == pytest.approx(richardson(shift_x, 1e-4), rel=1e-8)

        def shift_y(h, i=i):
            yp = yv.copy()
            yp[i] += h
            return f_plain(xv, yp)

        assert jet.deriv_y(i) == pytest.approx(richardson(shift_y, 1e-4), rel=1e-8)


def test_mixed_higher_derivatives_match_fd(point):
    xv, yv = point
    space = space_for(2, 2, 3, 5)
    xs, ys = space.lift(xv, yv)
    jet = f_scalar(xs, ys)

    # d^3/dx0 dy0 dy1 via nested central differences on the exact y-jet
    def dy0y1(xshift):
        xp = xv.copy()
        xp[0] += xshift
        sp = space_for(2, 0, 2, 2)
        return f_scalar(list(xp), sp.lift_y(yv)).deriv_y(0, 1)

    expected = richardson(dy0y1, 1e-4)
    assert jet.deriv((1, 0, 1, 1)) == pytest.approx(expected, rel=1e-7)


def test_formal_partial_consistent_with_extraction(point):
    xv, yv = point
    space = space_for(2, 2, 3, 5)
    xs, ys = space.lift(xv, yv)
    jet = f_scalar(xs, ys)
    # partial then value == first derivative
    for i in range(2):
        assert jet.partial_y(i).value == pytest.approx(jet.deriv_y(i), rel=1e-13)
    # mixed second derivative both ways
    d = jet.partial_x(1).partial_y(0)
    assert d.value == pytest.approx(jet.deriv((0, 1, 1, 0)), rel=1e-12)


def test_batched_coefficients_match_scalar_loop():
    rng = np.random.default_rng(3)
    X = rng.uniform(-0.3, 0.3, size=(5, 2))
    Y = rng.uniform(0.4, 1.0, size=(5, 2))
    space = space_for(2, 1, 2, 3)
    xs, ys = space.lift(X, Y)
    batch = f_scalar(xs, ys)
    for b in range(5):
        xs1, ys1 = space.lift(X[b], Y[b])
        single = f_scalar(xs1, ys1)
        np.testing.assert_allclose(batch.c[b], single.c, rtol=1e-13, atol=1e-15)


def test_reciprocal_and_sqrt_roundtrip(point):
    xv, yv = point
    space = space_for(2, 2, 2, 4)
    xs, ys = space.lift(xv, yv)
    jet = 1.3 + xs[0] * ys[1] + ys[0] * ys[0]
    one = jet * jet.reciprocal()
    np.testing.assert_allclose(one.c[..., 0], 1.0, rtol=1e-13)
    np.testing.assert_allclose(one.c[..., 1:], 0.0, atol=1e-13)
    back = jet.sqrt() * jet.sqrt()
    np.testing.assert_allclose(back.c, jet.c, rtol=1e-12, atol=1e-13)


def test_integer_powers():
    space = space_for(2, 1, 1, 2)
    xs, ys = space.lift(np.array([0.2, -0.1]), np.array([0.7, 0.9]))
    jet = 1.0 + xs[0] + ys[1]
    np.testing.assert_allclose((jet ** 3).c, (jet * jet * jet).c, rtol=1e-14)
    np.testing.assert_allclose((jet ** -2).c, (jet.reciprocal() * jet.reciprocal()).c, rtol=1e-12)
