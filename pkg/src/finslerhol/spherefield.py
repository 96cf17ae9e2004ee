"""Tangent vector fields on S^{n-1} with exact polynomial components.

The carrier of the generated algebra: rotation-type curvature fields
``xi_ij = lam (y^i d_j - y^j d_i)``, their closed-form horizontal derivatives
at the symmetric base point, and the exact Lie bracket.  Components are stored
canonically (see :mod:`finslerhol.spherepoly`), which makes equality, rank and
identity checks exact coefficient comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InternalConsistencyError
from .spherepoly import SpherePolynomial

__all__ = [
    "ModelParams",
    "SphereVectorField",
    "lie_bracket",
    "rotation_field",
    "contracted_rotation",
    "liouville_field",
    "liouville_identity_check",
    "monomial_times_field",
    "curvature_derivative_field",
    "curvature_derivative_from_connection",
    "curvature_second_derivative_field",
    "bracket_recursion_check",
]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise TypeError(f"exact value expected, got {type(value)!r}")


@dataclass(frozen=True)
class ModelParams:
    """Symmetric-point model data: dimension, projective slope c, curvature lam.

    ``c`` and ``lam`` are exact rationals.  The degenerate values c = 0 or
    lam = 0 are representable (the flat case has trivial holonomy); operations
    that require them nonzero say so.
    """

    n: int
    c: Fraction
    lam: Fraction

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need n >= 2")
        object.__setattr__(self, "c", _as_fraction(self.c))
        object.__setattr__(self, "lam", _as_fraction(self.lam))


class SphereVectorField:
    """Vector field sum_s V^s d/dy^s tangent to the unit sphere."""

    __slots__ = ("n", "components")

    def __init__(self, components, *, check_tangency: bool = True):
        components = tuple(components)
        if not components:
            raise ValueError("empty component list")
        n = components[0].n
        if len(components) != n:
            raise ValueError(f"expected {n} components, got {len(components)}")
        self.n = n
        self.components = components
        if check_tangency and not self.tangency_defect().is_zero:
            raise InternalConsistencyError(
                f"field is not tangent to the sphere: defect {self.tangency_defect()!r}"
            )

    @classmethod
    def zero(cls, n: int) -> "SphereVectorField":
        z = SpherePolynomial.zero(n)
        return cls((z,) * n, check_tangency=False)

    def tangency_defect(self) -> SpherePolynomial:
        acc = SpherePolynomial.zero(self.n)
        for s in range(self.n):
            acc = acc + SpherePolynomial.variable(self.n, s) * self.components[s]
        return acc

    # -- linear structure ----------------------------------------------------

    def _check(self, other):
        if self.n != other.n:
            raise ValueError("fields on different spheres")

    def __add__(self, other):
        self._check(other)
        return SphereVectorField(
            tuple(a + b for a, b in zip(self.components, other.components)),
            check_tangency=False,
        )

    def __sub__(self, other):
        self._check(other)
        return SphereVectorField(
            tuple(a - b for a, b in zip(self.components, other.components)),
            check_tangency=False,
        )

    def __neg__(self):
        return SphereVectorField(
            tuple(-a for a in self.components), check_tangency=False
        )

    def __mul__(self, scalar):
        coef = _as_fraction(scalar)
        return SphereVectorField(
            tuple(a * coef for a in self.components), check_tangency=False
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, SphereVectorField)
            and self.n == other.n
            and self.components == other.components
        )

    def __hash__(self):
        return hash(self.components)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    @property
    def degree(self) -> int:
        """Grading degree: max canonical component degree minus one.

        The rotation fields have degree 0; ``y^m xi_ij`` has degree l(m).
        The zero field reports -1.
        """
        top = max(c.degree for c in self.components)
        return top - 1 if top >= 0 else -1

    def evaluate(self, y) -> np.ndarray:
        return np.array([c.evaluate(y) for c in self.components])

    def __repr__(self):
        return f"SphereVectorField(n={self.n}, degree={self.degree})"


def lie_bracket(V: SphereVectorField, W: SphereVectorField) -> SphereVectorField:
    """[V, W]^i = V^s dW^i/dy^s - W^s dV^i/dy^s, reduced to canonical form.

    Well defined on canonical representatives because both fields are tangent
    (tangent derivations preserve the ideal); tangency of the result is
    asserted exactly.
    """
    V._check(W)
    n = V.n
    comps = []
    for i in range(n):
        acc = SpherePolynomial.zero(n)
        for s in range(n):
            acc = acc + V.components[s] * W.components[i].partial(s)
            acc = acc - W.components[s] * V.components[i].partial(s)
        comps.append(acc)
    return SphereVectorField(tuple(comps), check_tangency=True)


# ---------------------------------------------------------------------------
# curvature vector fields and their closed-form covariant derivatives
# ---------------------------------------------------------------------------


def rotation_field(params: ModelParams, i: int, j: int) -> SphereVectorField:
    """xi_ij = lam (y^i d_j - y^j d_i); zero when i == j."""
    n = params.n
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError("index out of range")
    comps = [SpherePolynomial.zero(n) for _ in range(n)]
    if i != j:
        yi = SpherePolynomial.variable(n, i)
        yj = SpherePolynomial.variable(n, j)
        comps[j] = comps[j] + params.lam * yi
        comps[i] = comps[i] - params.lam * yj
    return SphereVectorField(tuple(comps), check_tangency=False)


def contracted_rotation(params: ModelParams, j: int) -> SphereVectorField:
    """Y_j = sum_s y^s xi_sj."""
    n = params.n
    acc = SphereVectorField.zero(n)
    for s in range(n):
        acc = acc + monomial_times_field(_unit(n, s), rotation_field(params, s, j))
    return acc


def liouville_field(params: ModelParams, k: int) -> SphereVectorField:
    """lam (y^k C - |y|^2 d_k) with C the radial field; tangent to the sphere."""
    n = params.n
    yk = SpherePolynomial.variable(n, k)
    sumsq = SpherePolynomial.zero(n)
    for s in range(n):
        ys = SpherePolynomial.variable(n, s)
        sumsq = sumsq + ys * ys
    comps = []
    for s in range(n):
        term = yk * SpherePolynomial.variable(n, s)
        if s == k:
            term = term - sumsq
        comps.append(params.lam * term)
    return SphereVectorField(tuple(comps), check_tangency=False)


def liouville_identity_check(params: ModelParams, k: int):
    """sum_s y^s xi_ks == lam (y^k C - |y|^2 d_k), exactly.

    Returns (ok, lhs, rhs); the witness pair makes failures inspectable.
    """
    n = params.n
    lhs = SphereVectorField.zero(n)
    for s in range(n):
        lhs = lhs + monomial_times_field(_unit(n, s), rotation_field(params, k, s))
    rhs = liouville_field(params, k)
    return lhs == rhs, lhs, rhs


def _unit(n: int, k: int) -> tuple:
    return tuple(1 if v == k else 0 for v in range(n))


def monomial_times_field(mono, field: SphereVectorField) -> SphereVectorField:
    scale = SpherePolynomial.monomial(field.n, mono)
    return SphereVectorField(
        tuple(scale * c for c in field.components), check_tangency=False
    )


def curvature_derivative_field(params: ModelParams, k: int, i: int, j: int) -> SphereVectorField:
    """nabla_k xi_ij at the symmetric point, with |y| = 1 on the indicatrix:

        c (2 y^k xi_ij + delta^k_i sum_s y^s xi_sj - delta^k_j sum_s y^s xi_si)
    """
    out = 2 * monomial_times_field(_unit(params.n, k), rotation_field(params, i, j))
    if k == i:
        out = out + contracted_rotation(params, j)
    if k == j:
        out = out - contracted_rotation(params, i)
    return params.c * out


def _connection_polynomial(params: ModelParams, s: int, k: int, i: int) -> SpherePolynomial:
    """G^s_ki at the symmetric point with |y| = 1:
    c (y^s delta_ki + y^k delta^s_i + y^i delta^s_k - y^s y^k y^i)."""
    n = params.n
    acc = SpherePolynomial.zero(n)
    if k == i:
        acc = acc + SpherePolynomial.variable(n, s)
    if s == i:
        acc = acc + SpherePolynomial.variable(n, k)
    if s == k:
        acc = acc + SpherePolynomial.variable(n, i)
    acc = acc - (
        SpherePolynomial.variable(n, s)
        * SpherePolynomial.variable(n, k)
        * SpherePolynomial.variable(n, i)
    )
    return params.c * acc


def curvature_derivative_from_connection(params: ModelParams, k: int, i: int, j: int) -> SphereVectorField:
    """nabla_k xi_ij = G^s_ki xi_sj + G^s_kj xi_is (curvature is parallel)."""
    n = params.n
    acc = SphereVectorField.zero(n)
    for s in range(n):
        gki = _connection_polynomial(params, s, k, i)
        acc = acc + SphereVectorField(
            tuple(gki * c for c in rotation_field(params, s, j).components),
            check_tangency=False,
        )
        gkj = _connection_polynomial(params, s, k, j)
        acc = acc + SphereVectorField(
            tuple(gkj * c for c in rotation_field(params, i, s).components),
            check_tangency=False,
        )
    return acc


def curvature_second_derivative_field(
    params: ModelParams, m: int, k: int, i: int, j: int
) -> SphereVectorField:
    """nabla_m nabla_k xi_ij at the symmetric point (|y| = 1 on the indicatrix):

        (lam + c^2)(delta^m_j xi_ki - delta^m_i xi_kj)
        + c^2 (delta^k_j xi_mi - delta^k_i xi_mj)
        + 2 (c^2 - lam) delta^m_k xi_ij
        + 4 c^2 (y^m y^k xi_ij + delta^i_k y^m Y_j - delta^j_k y^m Y_i
                 - delta^j_m y^k Y_i + delta^i_m y^k Y_j)

    with Y_j = sum_s y^s xi_sj.  Verified numerically against the Berwald
    second covariant derivative of the curvature field for the Funk metric.
    """
    n = params.n
    c2 = params.c * params.c
    xi = lambda a, b: rotation_field(params, a, b)
    Y = lambda a: contracted_rotation(params, a)
    ym = _unit(n, m)
    yk = _unit(n, k)
    ymk = tuple(a + b for a, b in zip(ym, yk))

    out = SphereVectorField.zero(n)
    if m == j:
        out = out + (params.lam + c2) * xi(k, i)
    if m == i:
        out = out - (params.lam + c2) * xi(k, j)
    if k == j:
        out = out + c2 * xi(m, i)
    if k == i:
        out = out - c2 * xi(m, j)
    if m == k:
        out = out + 2 * (c2 - params.lam) * xi(i, j)
    quad = monomial_times_field(ymk, xi(i, j))
    if i == k:
        quad = quad + monomial_times_field(ym, Y(j))
    if j == k:
        quad = quad - monomial_times_field(ym, Y(i))
    if j == m:
        quad = quad - monomial_times_field(yk, Y(i))
    if i == m:
        quad = quad + monomial_times_field(yk, Y(j))
    return out + 4 * c2 * quad


# ---------------------------------------------------------------------------
# bracket recursions
# ---------------------------------------------------------------------------


def bracket_recursion_check(params: ModelParams, mono, i: int, j: int, k: int):
    """[y^m xi_ij, sum_s y^s xi_ks] against its closed form, exactly.

    For k not in {i, j}:  lam (m_k y^{m-1_k} - p y^{m+1_k}) xi_ij.
    For k == i:           lam (m_i y^{m-1_i} xi_ij + (1-p) y^{m+1_i} xi_ij
                               + sum_{s != i} y^{m+1_s} xi_sj).
    For k == j the k == i form applies after xi_ij = -xi_ji.
    (The lam prefactor is required by the Liouville identity; see ledger.)

    Returns (ok, lhs, rhs).
    """
    n = params.n
    mono = tuple(int(e) for e in mono)
    if len(mono) != n or any(e < 0 for e in mono):
        raise ValueError(f"bad multi-index {mono!r}")
    if i == j:
        raise ValueError("needs i != j")
    p = sum(mono)
    if p < 1:
        raise ValueError("multi-index must have positive length")

    V = monomial_times_field(mono, rotation_field(params, i, j))
    W = SphereVectorField.zero(n)
    for s in range(n):
        W = W + monomial_times_field(_unit(n, s), rotation_field(params, k, s))
    lhs = lie_bracket(V, W)

    if k != i and k != j:
        rhs = _recursion_rhs_distinct(params, mono, i, j, k, p)
    elif k == i:
        rhs = _recursion_rhs_equal(params, mono, i, j, p)
    else:  # k == j
        rhs = -_recursion_rhs_equal(params, mono, j, i, p)
    return lhs == rhs, lhs, rhs


def _shift(mono, k, delta):
    out = list(mono)
    out[k] += delta
    return tuple(out)


def _recursion_rhs_distinct(params, mono, i, j, k, p):
    n = params.n
    rhs = SphereVectorField.zero(n)
    if mono[k] > 0:
        rhs = rhs + mono[k] * monomial_times_field(
            _shift(mono, k, -1), rotation_field(params, i, j)
        )
    rhs = rhs - p * monomial_times_field(_shift(mono, k, 1), rotation_field(params, i, j))
    return params.lam * rhs


def _recursion_rhs_equal(params, mono, i, j, p):
    n = params.n
    rhs = SphereVectorField.zero(n)
    if mono[i] > 0:
        rhs = rhs + mono[i] * monomial_times_field(
            _shift(mono, i, -1), rotation_field(params, i, j)
        )
    rhs = rhs + (1 - p) * monomial_times_field(
        _shift(mono, i, 1), rotation_field(params, i, j)
    )
    for s in range(n):
        if s == i:
            continue
        rhs = rhs + monomial_times_field(_shift(mono, s, 1), rotation_field(params, s, j))
    return params.lam * rhs
