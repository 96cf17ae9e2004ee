"""Riemann curvature of the nonlinear connection and curvature vector fields.

``R^i_jk = dG^i_j/dx^k - dG^i_k/dx^j + G^m_j G^i_km - G^m_k G^i_jm`` is
evaluated by formal jet algebra on the spray series, so every tensor entry is
exact up to float roundoff.  The constant-curvature template
``lambda (delta^i_k g_jm y^m - delta^i_j g_km y^m)`` drives both the residual
checks and the least-squares lambda fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .jets import Jet, as_jet, space_for
from .metrics import FinslerMetric, _validate
from .spray import _spray_series

__all__ = [
    "CurvatureValue",
    "riemann_curvature",
    "flag_curvature_residual",
    "lambda_fit",
    "curvature_vector_field",
    "curvature_field_xy_map",
    "covariant_curvature_residual",
    "second_covariant_curvature",
]

CURV_CAPS = (2, 4, 4)  # values of R
NABLA_CAPS = (3, 5, 5)  # R and its first horizontal/vertical derivatives
NABLA2_CAPS = (4, 6, 6)  # second covariant derivatives of curvature fields


@dataclass(frozen=True)
class CurvatureValue:
    """R[i, j, k] = R^i_jk(x, y) plus a pointwise least-squares lambda fit."""

    R: np.ndarray
    lambda_estimate: float | None


def _connection_series(metric, xs, ys):
    n = len(ys)
    _, g, TG = _spray_series(metric, xs, ys)
    TGj = [[TG[i].partial_y(j) for j in range(n)] for i in range(n)]
    TGjk = [
        [[TGj[i][j].partial_y(k) for k in range(n)] for j in range(n)]
        for i in range(n)
    ]
    return g, TG, TGj, TGjk


def _riemann_series(metric, xs, ys):
    n = len(ys)
    g, TG, TGj, TGjk = _connection_series(metric, xs, ys)
    zero = TG[0] - TG[0]
    TR = [[[zero for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                acc = TGj[i][j].partial_x(k) - TGj[i][k].partial_x(j)
                for m in range(n):
                    acc = acc + TGj[m][j] * TGjk[i][k][m] - TGj[m][k] * TGjk[i][j][m]
                TR[i][j][k] = acc
                TR[i][k][j] = -acc
    return g, TGj, TGjk, TR


def _template(g, ys):
    """(delta^i_k g_jm y^m - delta^i_j g_km y^m) from the fundamental tensor jets."""
    n = len(ys)
    gy = []
    for j in range(n):
        acc = None
        for m in range(n):
            term = np.asarray(g[j][m].value) * np.asarray(
                ys[m].value if isinstance(ys[m], Jet) else ys[m]
            )
            acc = term if acc is None else acc + term
        gy.append(acc)
    batch = np.shape(gy[0])
    T = np.zeros(batch + (n, n, n))
    for i in range(n):
        for j in range(n):
            T[..., i, j, i] += gy[j]
            T[..., i, i, j] -= gy[j]
    return T


def riemann_curvature(metric: FinslerMetric, x, y) -> CurvatureValue:
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, *CURV_CAPS)
    xs, ys = space.lift(x, y)
    g, _, _, TR = _riemann_series(metric, xs, ys)
    batch = np.shape(TR[0][0][1].value) if n > 1 else ()
    R = np.zeros(batch + (n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                R[..., i, j, k] = TR[i][j][k].value
    T = _template(g, ys)
    tt = float(np.sum(T * T))
    lam = float(np.sum(R * T) / tt) if tt > 0 else None
    return CurvatureValue(R=R, lambda_estimate=lam)


def flag_curvature_residual(metric: FinslerMetric, x, y, lam: float) -> float:
    """max |R^i_jk - lambda(...)|; zero iff curvature is constant = lambda at (x,y)."""
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, *CURV_CAPS)
    xs, ys = space.lift(x, y)
    g, _, _, TR = _riemann_series(metric, xs, ys)
    T = _template(g, ys)
    resid = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                resid = max(
                    resid,
                    float(np.max(np.abs(TR[i][j][k].value - T[..., i, j, k] * lam))),
                )
    return resid


def lambda_fit(metric: FinslerMetric, X, Y) -> tuple[float, float]:
    """Least-squares lambda over a batch of samples plus worst relative residual."""
    cv = riemann_curvature(metric, X, Y)
    x, y = _validate(metric, X, Y)
    n = metric.dim
    space = space_for(n, 0, 2, 2)
    xs = [x[..., i] for i in range(n)]
    ys = space.lift_y(y)
    h = metric.squared(xs, ys)
    gy = np.stack(
        [0.5 * np.asarray(h.partial_y(j).value) for j in range(n)], axis=-1
    )  # g_jm y^m = (1/2) dF^2/dy^j
    batch = gy.shape[:-1]
    T = np.zeros(batch + (n, n, n))
    for i in range(n):
        for j in range(n):
            T[..., i, j, i] += gy[..., j]
            T[..., i, i, j] -= gy[..., j]
    lam = float(np.sum(cv.R * T) / np.sum(T * T))
    resid = cv.R - lam * T
    axes = tuple(range(len(batch), len(batch) + 3))
    per_sample = np.max(np.abs(resid), axis=axes) / np.maximum(
        np.max(np.abs(cv.R), axis=axes), 1e-300
    )
    return lam, float(np.max(per_sample))


def curvature_vector_field(metric: FinslerMetric, x, i: int, j: int):
    """The map y -> R^s_ij(x, y) as a plain ndarray-valued function.

    For i == j the zero field is returned with ``field.trivial = True``.
    """
    x = np.asarray(x, dtype=float)
    n = metric.dim

    if i == j:
        def zero_field(y):
            y = np.asarray(y, dtype=float)
            return np.zeros(y.shape[:-1] + (n,))

        zero_field.trivial = True
        return zero_field

    def field(y):
        cv = riemann_curvature(metric, x, y)
        return cv.R[..., :, i, j]

    field.trivial = False
    return field


def curvature_field_xy_map(metric: FinslerMetric, i: int, j: int):
    """Curvature vector field as a jet-composable map of lifted (xs, ys).

    With plain floats it returns component values; with first-order jets it
    composes via the chain rule from the exact curvature series, so it can be
    fed to :func:`finslerhol.spray.berwald_covariant_derivative`.
    """
    n = metric.dim

    def fieldfun(xs, ys):
        if not any(isinstance(v, Jet) for v in list(xs) + list(ys)):
            x = np.stack([np.asarray(v, dtype=float) for v in xs], axis=-1)
            y = np.stack([np.asarray(v, dtype=float) for v in ys], axis=-1)
            cv = riemann_curvature(metric, x, y)
            return [cv.R[..., s, i, j] for s in range(n)]

        outer = next(v.space for v in list(xs) + list(ys) if isinstance(v, Jet))
        if outer.cap_total != 1:
            raise ValueError("curvature field composes only with first-order jets")
        xs = [as_jet(outer, v) for v in xs]
        ys = [as_jet(outer, v) for v in ys]
        xv = np.stack([np.asarray(v.value) for v in xs], axis=-1)
        yv = np.stack([np.asarray(v.value) for v in ys], axis=-1)
        inner = space_for(n, *NABLA_CAPS)
        ixs, iys = inner.lift(xv, yv)
        _, _, _, TR = _riemann_series(metric, ixs, iys)
        out = []
        for s in range(n):
            comp = TR[s][i][j]
            jet = outer.constant(comp.value)
            for m in range(n):
                jet = jet + comp.deriv_x(m) * (xs[m] - xv[..., m])
                jet = jet + comp.deriv_y(m) * (ys[m] - yv[..., m])
            out.append(jet)
        return out

    return fieldfun


def _series_covariant(TW, Gj, Gjk, direction, n):
    """Value of nabla_direction applied to a list of component series."""
    out = np.empty(np.shape(TW[0].value) + (n,))
    for s in range(n):
        val = np.asarray(TW[s].deriv_x(direction)).copy()
        for t in range(n):
            val = val - Gj[..., t, direction] * TW[s].deriv_y(t)
            val = val + Gjk[..., s, direction, t] * np.asarray(TW[t].value)
        out[..., s] = val
    return out


def _extract_connection_values(TG, n):
    batch = np.shape(TG[0].value)
    Gj = np.empty(batch + (n, n))
    Gjk = np.empty(batch + (n, n, n))
    for a in range(n):
        for b in range(n):
            Gj[..., a, b] = TG[a].deriv_y(b)
            for c in range(b, n):
                Gjk[..., a, b, c] = TG[a].deriv_y(b, c)
                Gjk[..., a, c, b] = Gjk[..., a, b, c]
    return Gj, Gjk


def covariant_curvature_residual(metric: FinslerMetric, x, y, k: int) -> float:
    """max over (i, j) of |nabla_k xi_ij - (G^s_ki xi_sj + G^s_kj xi_is)|.

    Vanishes identically because the curvature tensor is parallel for the
    Berwald connection of any Finsler metric.
    """
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, *NABLA_CAPS)
    xs, ys = space.lift(x, y)
    _, TG, _, _ = _connection_series(metric, xs, ys)
    _, _, _, TR = _riemann_series(metric, xs, ys)
    Gj, Gjk = _extract_connection_values(TG, n)
    R = np.empty(np.shape(TR[0][0][0].value) + (n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                R[..., a, b, c] = TR[a][b][c].value
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            nabla = _series_covariant([TR[s][i][j] for s in range(n)], Gj, Gjk, k, n)
            # G^s_ki xi_sj + G^s_kj xi_is, component t
            rhs = np.einsum("...s,...ts->...t", Gjk[..., :, k, i], R[..., :, :, j])
            rhs = rhs + np.einsum("...s,...ts->...t", Gjk[..., :, k, j], R[..., :, i, :])
            worst = max(worst, float(np.max(np.abs(nabla - rhs))))
    return worst


def second_covariant_curvature(metric: FinslerMetric, x, y, m: int, k: int, i: int, j: int) -> np.ndarray:
    """Components of nabla_m nabla_k applied to the curvature field xi_ij."""
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, *NABLA2_CAPS)
    xs, ys = space.lift(x, y)
    _, TG, TGj, TGjk = _connection_series(metric, xs, ys)
    _, _, _, TR = _riemann_series(metric, xs, ys)
    Gj, Gjk = _extract_connection_values(TG, n)
    # first covariant derivative as a series in (x, y)
    TW = []
    for s in range(n):
        acc = TR[s][i][j].partial_x(k)
        for t in range(n):
            acc = acc - TGj[t][k] * TR[s][i][j].partial_y(t)
            acc = acc + TGjk[s][k][t] * TR[t][i][j]
        TW.append(acc)
    return _series_covariant(TW, Gj, Gjk, m, n)
