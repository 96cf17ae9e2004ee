"""Truncated multivariate Taylor arithmetic (jets) over float coefficients.

A ``Jet`` carries the value of an expression at a base point together with the
Taylor coefficients of all mixed partial derivatives up to configurable degree
caps.  The 2n perturbation variables split into a base-point group (directions
``x^1..x^n``) and a fiber group (``y^1..y^n``); each group has its own degree
cap in addition to a total-degree cap.  Evaluating a closed-form expression on
lifted inputs yields every retained derivative exactly (up to float roundoff),
including through square roots, quotients and linear solves, which is what the
metric formulas need near their singular denominators.

Coefficient arrays have shape ``(..., size)`` so a batch of base points can be
pushed through a formula in one pass.

Truncation bookkeeping: multiplying two jets keeps a coefficient exact whenever
the full basis is downward closed (it is), but *formal* derivatives shift
monomials, so a coefficient of ``jet.partial(v)`` is only trustworthy when the
shifted monomial was inside the caps.  Callers that chain formal derivatives
pick their caps accordingly; the tests cross-check every such chain against
finite differences.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

import numpy as np

__all__ = ["Jet", "JetSpace", "space_for", "as_jet"]


def _exponent_tuples(nvars: int, cap: int) -> list[tuple[int, ...]]:
    """All exponent tuples in ``nvars`` variables with total degree <= cap."""
    if nvars == 0:
        return [()]
    out = []
    stack = [((), cap)]
    while stack:
        prefix, budget = stack.pop()
        if len(prefix) == nvars - 1:
            for e in range(budget + 1):
                out.append(prefix + (e,))
            continue
        for e in range(budget + 1):
            stack.append((prefix + (e,), budget - e))
    return out


class JetSpace:
    """Shared tables for one (dimension, caps) configuration.

    Variables ``0..n-1`` are base-point directions, ``n..2n-1`` fiber
    directions.  Instances are cached by :func:`space_for`; treat them as
    immutable.
    """

    def __init__(self, n: int, cap_x: int, cap_y: int, cap_total: int):
        self.n = n
        self.cap_x = cap_x
        self.cap_y = cap_y
        self.cap_total = cap_total
        xparts = _exponent_tuples(n, min(cap_x, cap_total))
        yparts = _exponent_tuples(n, min(cap_y, cap_total))
        monomials = [
            a + b
            for a in xparts
            for b in yparts
            if sum(a) + sum(b) <= cap_total
        ]
        monomials.sort(key=lambda m: (sum(m), m))
        self.monomials = monomials
        self.index = {m: i for i, m in enumerate(monomials)}
        self.size = len(monomials)

        fact = np.empty(self.size)
        for i, m in enumerate(monomials):
            f = 1.0
            for e in m:
                f *= math.factorial(e)
            fact[i] = f
        self._fact = fact

        i1, i2, starts = [], [], []
        for m in monomials:
            starts.append(len(i1))
            for d in product(*(range(e + 1) for e in m)):
                rest = tuple(me - de for me, de in zip(m, d))
                i1.append(self.index[d])
                i2.append(self.index[rest])
        self._mul_i1 = np.asarray(i1, dtype=np.intp)
        self._mul_i2 = np.asarray(i2, dtype=np.intp)
        self._mul_starts = np.asarray(starts, dtype=np.intp)
        self._dmaps: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    # -- construction -----------------------------------------------------

    def constant(self, value) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (self.size,))
        c[..., 0] = value
        return Jet(self, c)

    def lift(self, x, y) -> tuple[list["Jet"], list["Jet"]]:
        """Seed coordinates with first-order perturbations.

        ``x`` and ``y`` are arrays of shape ``(..., n)``; batched leading axes
        are carried through every operation.
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        xs = [self._seed(x[..., i], (i,)) for i in range(self.n)]
        ys = [self._seed(y[..., i], (self.n + i,)) for i in range(self.n)]
        return xs, ys

    def lift_x(self, x) -> list["Jet"]:
        x = np.asarray(x, dtype=float)
        return [self._seed(x[..., i], (i,)) for i in range(self.n)]

    def lift_y(self, y) -> list["Jet"]:
        y = np.asarray(y, dtype=float)
        return [self._seed(y[..., i], (self.n + i,)) for i in range(self.n)]

    def _seed(self, value, vars_at_one) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (self.size,))
        c[..., 0] = value
        for v in vars_at_one:
            unit = tuple(1 if i == v else 0 for i in range(2 * self.n))
            c[..., self.index[unit]] = 1.0
        return Jet(self, c)

    # -- internal tables ---------------------------------------------------

    def _dmap(self, var: int):
        cached = self._dmaps.get(var)
        if cached is not None:
            return cached
        src, dst, fac = [], [], []
        for i, m in enumerate(self.monomials):
            if m[var] == 0:
                continue
            lower = tuple(e - 1 if v == var else e for v, e in enumerate(m))
            src.append(i)
            dst.append(self.index[lower])
            fac.append(float(m[var]))
        entry = (
            np.asarray(src, dtype=np.intp),
            np.asarray(dst, dtype=np.intp),
            np.asarray(fac),
        )
        self._dmaps[var] = entry
        return entry

    def _multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        w = a[..., self._mul_i1] * b[..., self._mul_i2]
        return np.add.reduceat(w, self._mul_starts, axis=-1)

    def __repr__(self):
        return (
            f"JetSpace(n={self.n}, cap_x={self.cap_x}, cap_y={self.cap_y}, "
            f"cap_total={self.cap_total}, size={self.size})"
        )


@lru_cache(maxsize=None)
def space_for(n: int, cap_x: int, cap_y: int, cap_total: int) -> JetSpace:
    return JetSpace(n, cap_x, cap_y, cap_total)


def as_jet(space: JetSpace, value) -> "Jet":
    """Wrap a plain scalar as a constant jet; pass jets through unchanged."""
    return value if isinstance(value, Jet) else space.constant(value)


def _series_coeffs_inverse(order: int) -> list[float]:
    return [(-1.0) ** k for k in range(order + 1)]


def _series_coeffs_sqrt(order: int) -> list[float]:
    # binomial series for (1 + u)^(1/2)
    out = [1.0]
    for k in range(1, order + 1):
        out.append(out[-1] * (0.5 - (k - 1)) / k)
    return out


class Jet:
    """Element of a :class:`JetSpace`: a truncated Taylor polynomial."""

    __slots__ = ("space", "c")
    __array_ufunc__ = None  # keep numpy from broadcasting over us

    def __init__(self, space: JetSpace, c: np.ndarray):
        self.space = space
        self.c = c

    # -- extraction --------------------------------------------------------

    @property
    def value(self):
        return self.c[..., 0]

    def coeff(self, mono):
        return self.c[..., self.space.index[tuple(mono)]]

    def deriv(self, mono):
        """Mixed partial derivative value for the given exponent tuple."""
        i = self.space.index[tuple(mono)]
        return self.c[..., i] * self.space._fact[i]

    def deriv_x(self, *dirs):
        return self.deriv(self._mono_from_dirs(dirs, 0))

    def deriv_y(self, *dirs):
        return self.deriv(self._mono_from_dirs(dirs, self.space.n))

    def _mono_from_dirs(self, dirs, offset):
        m = [0] * (2 * self.space.n)
        for d in dirs:
            m[offset + d] += 1
        return tuple(m)

    def partial(self, var: int) -> "Jet":
        """Formal derivative with respect to perturbation variable ``var``."""
        src, dst, fac = self.space._dmap(var)
        out = np.zeros_like(self.c)
        out[..., dst] = self.c[..., src] * fac
        return Jet(self.space, out)

    def partial_x(self, i: int) -> "Jet":
        return self.partial(i)

    def partial_y(self, i: int) -> "Jet":
        return self.partial(self.space.n + i)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets from different spaces")
            return other.c
        return None

    def __add__(self, other):
        oc = self._coerce(other)
        if oc is not None:
            return Jet(self.space, self.c + oc)
        out = self.c.copy()
        out[..., 0] += other
        return Jet(self.space, out)

    __radd__ = __add__

    def __sub__(self, other):
        oc = self._coerce(other)
        if oc is not None:
            return Jet(self.space, self.c - oc)
        out = self.c.copy()
        out[..., 0] -= other
        return Jet(self.space, out)

    def __rsub__(self, other):
        out = -self.c
        out[..., 0] += other
        return Jet(self.space, out)

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __mul__(self, other):
        oc = self._coerce(other)
        if oc is not None:
            return Jet(self.space, self.space._multiply(self.c, oc))
        return Jet(self.space, self.c * np.asarray(other)[..., None])

    __rmul__ = __mul__

    def __truediv__(self, other):
        oc = self._coerce(other)
        if oc is not None:
            return self * other.reciprocal()
        return Jet(self.space, self.c / np.asarray(other)[..., None])

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("jet powers must be integers")
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        result = self.space.constant(np.ones(self.c.shape[:-1]))
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    # -- analytic primitives ------------------------------------------------

    def _nilpotent_ratio(self):
        a0 = self.c[..., 0]
        u = self.c / a0[..., None]
        u = u.copy()
        u[..., 0] = 0.0
        return a0, Jet(self.space, u)

    def _compose(self, u: "Jet", coeffs) -> "Jet":
        acc = self.space.constant(np.full(u.c.shape[:-1], coeffs[-1]))
        for k in range(len(coeffs) - 2, -1, -1):
            acc = acc * u + coeffs[k]
        return acc

    def reciprocal(self) -> "Jet":
        if np.any(self.c[..., 0] == 0.0):
            raise ZeroDivisionError("jet with zero value part")
        a0, u = self._nilpotent_ratio()
        series = self._compose(u, _series_coeffs_inverse(self.space.cap_total))
        return Jet(self.space, series.c / a0[..., None])

    def sqrt(self) -> "Jet":
        a0 = self.c[..., 0]
        if np.any(a0 <= 0.0):
            raise ValueError("jet sqrt needs a strictly positive value part")
        _, u = self._nilpotent_ratio()
        series = self._compose(u, _series_coeffs_sqrt(self.space.cap_total))
        return Jet(self.space, series.c * np.sqrt(a0)[..., None])

    def __repr__(self):
        return f"Jet(value={self.value!r}, space={self.space!r})"
