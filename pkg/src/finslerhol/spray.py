"""Geodesic spray, nonlinear connection and Berwald covariant derivatives.

The spray is computed as ``G^i = (1/4) g^{il} (y^k d2F2/dx^k dy^l - dF2/dx^l)``,
which by homogeneity of F^2 equals the textbook contraction
``(1/4) g^{il} (2 dg_jl/dx^k - dg_jk/dx^l) y^j y^k`` while needing one fewer
derivative order of F^2; the tests assert agreement of both forms.  All
derivative tensors are produced by jet arithmetic through the full chain
(metric -> g -> solve -> G), never by differencing intermediate matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .jets import Jet, as_jet, space_for
from .metrics import FinslerMetric, _validate

__all__ = [
    "SprayData",
    "ProjectiveFactorValue",
    "spray_data",
    "connection_x_derivatives",
    "projective_factor",
    "projective_flatness_residual",
    "finsler_horizontal_residual",
    "canonical_section_residual",
    "berwald_covariant_derivative",
]

# jet degree caps (cap_x, cap_y, cap_total); see module docstring of jets.py
SPRAY_CAPS = (1, 4, 4)  # values of G, G^i_j, G^i_jk
CONNECTION_X_CAPS = (2, 4, 4)  # additionally dG^i_j/dx^k

COND_REPORT = 1e8
COND_FAIL = 1e12


@dataclass(frozen=True)
class SprayData:
    """Spray coefficients and their fiber derivatives at one (x, y).

    ``G`` has shape (..., n); ``Gj[i, j] = dG^i/dy^j``; ``Gjk[i, j, k]``
    is the second fiber derivative.  ``cond`` is the condition number of the
    fundamental tensor used in the solve.
    """

    G: np.ndarray
    Gj: np.ndarray
    Gjk: np.ndarray
    cond: float


@dataclass(frozen=True)
class ProjectiveFactorValue:
    P: float
    dPdx: np.ndarray


def _solve_jets(M, b):
    """Solve M v = b in jet arithmetic; no pivoting (M is positive definite)."""
    n = len(b)
    M = [row[:] for row in M]
    b = list(b)
    invs = [None] * n
    for k in range(n):
        invs[k] = M[k][k].reciprocal()
        for r in range(k + 1, n):
            f = M[r][k] * invs[k]
            for c in range(k + 1, n):
                M[r][c] = M[r][c] - f * M[k][c]
            b[r] = b[r] - f * b[k]
    out = [None] * n
    for k in range(n - 1, -1, -1):
        acc = b[k]
        for c in range(k + 1, n):
            acc = acc - M[k][c] * out[c]
        out[k] = acc * invs[k]
    return out


def _fundamental_series(metric: FinslerMetric, xs, ys):
    h = metric.squared(xs, ys)
    n = len(ys)
    g = [[None] * n for _ in range(n)]
    for a in range(n):
        ha = h.partial_y(a)
        for b in range(a, n):
            gab = ha.partial_y(b) * 0.5
            g[a][b] = gab
            g[b][a] = gab
    return h, g


def _spray_series(metric: FinslerMetric, xs, ys):
    """Taylor series of the spray coefficients G^i around the lifted point."""
    h, g = _fundamental_series(metric, xs, ys)
    n = len(ys)
    rhs = []
    for l in range(n):
        hl = None
        for k in range(n):
            term = ys[k] * h.partial_x(k).partial_y(l)
            hl = term if hl is None else hl + term
        rhs.append(hl - h.partial_x(l))
    try:
        solved = _solve_jets(g, rhs)
    except ZeroDivisionError as exc:
        _condition(g)  # raises NumericError with the condition number
        raise NumericError("fundamental tensor singular in the spray solve") from exc
    return h, g, [gi * 0.25 for gi in solved]


def _condition(g) -> float:
    n = len(g)
    mat = np.stack(
        [np.stack([np.asarray(g[a][b].value) for b in range(n)], axis=-1) for a in range(n)],
        axis=-2,
    )
    cond = float(np.max(np.linalg.cond(mat)))
    if not np.isfinite(cond) or cond > COND_FAIL:
        raise NumericError(
            f"fundamental tensor effectively singular (condition number {cond:.3e})"
        )
    return cond


def spray_data(metric: FinslerMetric, x, y) -> SprayData:
    """G^i, G^i_j and G^i_jk at (x, y); supports batched inputs (..., n)."""
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, *SPRAY_CAPS)
    xs, ys = space.lift(x, y)
    _, g, TG = _spray_series(metric, xs, ys)
    cond = _condition(g)
    batch = np.shape(TG[0].value)
    G = np.empty(batch + (n,))
    Gj = np.empty(batch + (n, n))
    Gjk = np.empty(batch + (n, n, n))
    for i in range(n):
        G[..., i] = TG[i].value
        for j in range(n):
            Gj[..., i, j] = TG[i].deriv_y(j)
            for k in range(j, n):
                Gjk[..., i, j, k] = TG[i].deriv_y(j, k)
                Gjk[..., i, k, j] = Gjk[..., i, j, k]
    return SprayData(G, Gj, Gjk, cond)


def connection_x_derivatives(metric: FinslerMetric, x, y) -> np.ndarray:
    """dG^i_j/dx^k at (x, y), shape (..., n, n, n) indexed [i, j, k]."""
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, *CONNECTION_X_CAPS)
    xs, ys = space.lift(x, y)
    _, _, TG = _spray_series(metric, xs, ys)
    batch = np.shape(TG[0].value)
    out = np.empty(batch + (n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                mono = [0] * (2 * n)
                mono[k] = 1
                mono[n + j] = 1
                out[..., i, j, k] = TG[i].deriv(mono)
    return out


def projective_factor(metric: FinslerMetric, x, y) -> ProjectiveFactorValue:
    """P = (dF/dx^i y^i) / (2F) and its base-point gradient dP/dx^m."""
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, 2, 0, 2)
    xs = space.lift_x(x)
    ys = [y[..., i] for i in range(n)]
    F = as_jet(space, metric.value(xs, ys))
    num = None
    for i in range(n):
        term = F.partial_x(i) * ys[i]
        num = term if num is None else num + term
    P = num / (F * 2.0)
    dPdx = np.stack([np.asarray(P.deriv_x(m)) for m in range(n)], axis=-1)
    return ProjectiveFactorValue(P=P.value, dPdx=dPdx)


def projective_factor_y_gradient(metric: FinslerMetric, x, y) -> np.ndarray:
    """dP/dy^m, used to verify dP/dx^m = (1/2) d(P^2 - lambda F^2)/dy^m."""
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, 1, 1, 2)
    xs, ys = space.lift(x, y)
    F = as_jet(space, metric.value(xs, ys))
    num = None
    for i in range(n):
        term = F.partial_x(i) * ys[i]
        num = term if num is None else num + term
    P = num / (F * 2.0)
    return np.stack([np.asarray(P.deriv_y(m)) for m in range(n)], axis=-1)


def projective_flatness_residual(metric: FinslerMetric, x, y) -> float:
    """max |G^i - P y^i| / max(|G|, tiny); ~0 iff geodesics are straight lines."""
    sd = spray_data(metric, x, y)
    pf = projective_factor(metric, x, y)
    y = np.asarray(y, dtype=float)
    resid = np.max(np.abs(sd.G - np.asarray(pf.P)[..., None] * y))
    scale = max(float(np.max(np.abs(sd.G))), 1e-300)
    return float(resid) / scale


def finsler_horizontal_residual(metric: FinslerMetric, x, y) -> float:
    """max_j |dF/dx^j - G^k_j dF/dy^k|; vanishes for every Finsler metric."""
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, 1, 1, 2)
    xs, ys = space.lift(x, y)
    F = as_jet(space, metric.value(xs, ys))
    Fx = np.stack([np.asarray(F.deriv_x(i)) for i in range(n)], axis=-1)
    Fy = np.stack([np.asarray(F.deriv_y(i)) for i in range(n)], axis=-1)
    sd = spray_data(metric, x, y)
    resid = Fx - np.einsum("...kj,...k->...j", sd.Gj, Fy)
    return float(np.max(np.abs(resid)))


def canonical_section_residual(metric: FinslerMetric, x, y) -> float:
    """max |nabla_X y|; the canonical section is parallel, so this vanishes."""
    sd = spray_data(metric, x, y)
    y = np.asarray(y, dtype=float)
    # nabla_j y^i = -G^i_j + G^i_jk y^k
    resid = -sd.Gj + np.einsum("...ijk,...k->...ij", sd.Gjk, y)
    return float(np.max(np.abs(resid)))


def berwald_covariant_derivative(metric: FinslerMetric, x, xi, direction: int):
    """Horizontal Berwald covariant derivative of a vertical vector field.

    ``xi`` maps lifted coordinates ``(xs, ys)`` (lists of jet scalars) to a
    list of n components built with ordinary arithmetic.  Returns the map
    ``y -> (nabla_direction xi)(x, y)`` as an ndarray of shape (n,).
    """
    x = np.asarray(x, dtype=float)
    n = metric.dim

    def field(y):
        y = np.asarray(y, dtype=float)
        space = space_for(n, 1, 1, 1)
        xs, ys = space.lift(x, y)
        comps = xi(xs, ys)
        comps = [
            c if isinstance(c, Jet) else space.constant(np.broadcast_to(c, y.shape[:-1]))
            for c in comps
        ]
        sd = spray_data(metric, x, y)
        out = np.empty(y.shape[:-1] + (n,))
        for i in range(n):
            val = np.asarray(comps[i].deriv_x(direction)).copy()
            for k in range(n):
                val -= sd.Gj[..., k, direction] * comps[i].deriv_y(k)
                val += sd.Gjk[..., i, direction, k] * comps[k].value
            out[..., i] = val
        return out

    return field
