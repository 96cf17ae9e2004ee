"""Exact-rational polynomial functions on the unit sphere S^{n-1}.

Elements of Q[y^1..y^n] / (|y|^2 - 1) in canonical form: the rewrite
``(y^n)^2 -> 1 - sum_{i<n} (y^i)^2`` is applied until every stored monomial
has last exponent 0 or 1.  Since the ideal generator is monic and quadratic in
y^n, remainders of y^n-degree <= 1 are unique, so equality of ring elements is
equality of the canonical coefficient maps.  All coefficients are
``fractions.Fraction``; floats are rejected to keep the module exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = ["SpherePolynomial"]

Monomial = tuple


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"exact coefficient expected (int/Fraction/str), got {type(value)!r}")


@lru_cache(maxsize=None)
def _one_minus_sumsq_power(n: int, q: int) -> tuple:
    """(1 - sum_{i<n} (y^i)^2)^q as sorted ((exponents), int) items."""
    if q == 0:
        return (((0,) * n, 1),)
    out: dict[Monomial, int] = {}
    for mono, coef in _one_minus_sumsq_power(n, q - 1):
        out[mono] = out.get(mono, 0) + coef
        for i in range(n - 1):
            bumped = mono[:i] + (mono[i] + 2,) + mono[i + 1 :]
            out[bumped] = out.get(bumped, 0) - coef
    return tuple(sorted((m, c) for m, c in out.items() if c))


def _canonicalize(n: int, terms: dict) -> dict:
    out: dict[Monomial, Fraction] = {}
    for mono, coef in terms.items():
        if coef == 0:
            continue
        last = mono[-1]
        if last < 2:
            out[mono] = out.get(mono, Fraction(0)) + coef
            continue
        q, r = divmod(last, 2)
        head = mono[:-1]
        for pm, pc in _one_minus_sumsq_power(n, q):
            new = tuple(a + b for a, b in zip(head, pm[:-1])) + (r,)
            out[new] = out.get(new, Fraction(0)) + coef * pc
    return {m: c for m, c in out.items() if c != 0}


class SpherePolynomial:
    """Canonical element of Q[y^1..y^n] modulo (|y|^2 - 1)."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, terms=None, *, _canonical: bool = False):
        if n < 2:
            raise ValueError("sphere polynomials need n >= 2")
        self.n = n
        if terms is None:
            self.coeffs: dict[Monomial, Fraction] = {}
            return
        clean: dict[Monomial, Fraction] = {}
        for mono, coef in dict(terms).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n or any(e < 0 for e in mono):
                raise ValueError(f"bad exponent tuple {mono!r}")
            coef = _as_fraction(coef)
            if coef != 0:
                clean[mono] = clean.get(mono, Fraction(0)) + coef
        self.coeffs = clean if _canonical else _canonicalize(n, clean)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "SpherePolynomial":
        return cls(n, {}, _canonical=True)

    @classmethod
    def constant(cls, n: int, value) -> "SpherePolynomial":
        return cls(n, {(0,) * n: _as_fraction(value)})

    @classmethod
    def one(cls, n: int) -> "SpherePolynomial":
        return cls.constant(n, 1)

    @classmethod
    def variable(cls, n: int, i: int) -> "SpherePolynomial":
        mono = tuple(1 if k == i else 0 for k in range(n))
        return cls(n, {mono: Fraction(1)}, _canonical=True)

    @classmethod
    def monomial(cls, n: int, exponents, coefficient=1) -> "SpherePolynomial":
        return cls(n, {tuple(exponents): _as_fraction(coefficient)})

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "SpherePolynomial"):
        if self.n != other.n:
            raise ValueError("mixing polynomials on different spheres")

    def __add__(self, other):
        if not isinstance(other, SpherePolynomial):
            return NotImplemented
        self._check(other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return SpherePolynomial(self.n, out, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, SpherePolynomial):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return SpherePolynomial(
            self.n, {m: -c for m, c in self.coeffs.items()}, _canonical=True
        )

    def __mul__(self, other):
        if isinstance(other, SpherePolynomial):
            self._check(other)
            out: dict[Monomial, Fraction] = {}
            for m1, c1 in self.coeffs.items():
                for m2, c2 in other.coeffs.items():
                    m = tuple(a + b for a, b in zip(m1, m2))
                    out[m] = out.get(m, Fraction(0)) + c1 * c2
            return SpherePolynomial(self.n, out)
        coef = _as_fraction(other)
        return SpherePolynomial(
            self.n, {m: c * coef for m, c in self.coeffs.items()}, _canonical=True
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative powers are not defined in the quotient ring")
        out = SpherePolynomial.one(self.n)
        for _ in range(exponent):
            out = out * self
        return out

    def partial(self, i: int) -> "SpherePolynomial":
        """Formal derivative of the canonical representative by y^i."""
        out: dict[Monomial, Fraction] = {}
        for m, c in self.coeffs.items():
            if m[i] == 0:
                continue
            lowered = m[:i] + (m[i] - 1,) + m[i + 1 :]
            out[lowered] = out.get(lowered, Fraction(0)) + c * m[i]
        return SpherePolynomial(self.n, out, _canonical=True)

    # -- queries -------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Total degree of the canonical representative; -1 for the zero element."""
        return max((sum(m) for m in self.coeffs), default=-1)

    def __eq__(self, other):
        return (
            isinstance(other, SpherePolynomial)
            and self.n == other.n
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.coeffs.items()))))

    def evaluate(self, y) -> float:
        """Float evaluation at a point (intended for points with |y| = 1)."""
        y = np.asarray(y, dtype=float)
        total = 0.0
        for m, c in self.coeffs.items():
            term = float(c)
            for yi, e in zip(y, m):
                if e:
                    term *= yi**e
            total += term
        return total

    def evaluate_exact(self, y) -> Fraction:
        """Exact evaluation at rational coordinates (caller ensures |y|^2 = 1)."""
        total = Fraction(0)
        for m, c in self.coeffs.items():
            term = c
            for yi, e in zip(y, m):
                if e:
                    term *= _as_fraction(yi) ** e
            total += term
        return total

    def sorted_items(self):
        return sorted(self.coeffs.items(), key=lambda mc: (sum(mc[0]), mc[0]))

    def __repr__(self):
        if self.is_zero:
            return "SpherePolynomial(0)"
        bits = []
        for m, c in self.sorted_items():
            vars_part = "*".join(
                f"y{i + 1}^{e}" if e > 1 else f"y{i + 1}"
                for i, e in enumerate(m)
                if e
            )
            bits.append(f"{c}" + (f"*{vars_part}" if vars_part else ""))
        return "SpherePolynomial(" + " + ".join(bits) + ")"
