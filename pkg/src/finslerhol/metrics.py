"""Built-in projectively flat Finsler metrics and exact pointwise derivatives.

Each metric is an immutable spec whose norm is evaluated generically: the
coordinate inputs may be plain floats, numpy arrays (batched points) or
:class:`~finslerhol.jets.Jet` scalars, so the same closed-form expression
serves values, arbitrary derivative tensors and batched scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, DegenerateInputError, DomainError
from .jets import Jet, space_for

__all__ = [
    "FinslerMetric",
    "Euclidean",
    "Funk",
    "BryantShen",
    "Scaled",
    "eval_norm",
    "eval_norm_squared",
    "fundamental_tensor",
    "directional_derivatives",
]

# reject Funk base points with |x| >= 1 - FUNK_MARGIN to keep 1/(1-|x|^2) sane
FUNK_MARGIN = 1e-9

MAX_ORDER_X = 2
MAX_ORDER_Y = 3


def _sqrt(z):
    return z.sqrt() if isinstance(z, Jet) else np.sqrt(z)


def _dot(u, v):
    acc = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        acc = acc + a * b
    return acc


def _value_part(z):
    return z.value if isinstance(z, Jet) else z


class FinslerMetric:
    """Common behaviour; concrete metrics are frozen dataclasses below."""

    dim: int

    def value(self, x, y):
        """Norm F(x, y) on generic scalars; y must be nonzero."""
        raise NotImplementedError

    def squared(self, x, y):
        v = self.value(x, y)
        return v * v

    def in_domain(self, x) -> bool:
        return True

    def check_domain(self, x):
        if not self.in_domain(x):
            raise DomainError(f"{self!r}: base point {x!r} outside metric domain")


@dataclass(frozen=True)
class Euclidean(FinslerMetric):
    dim: int

    def value(self, x, y):
        return _sqrt(_dot(y, y))

    def squared(self, x, y):
        return _dot(y, y)


@dataclass(frozen=True)
class Funk(FinslerMetric):
    """Funk metric on the open unit disk; ``sign`` selects forward/reverse."""

    dim: int
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("Funk sign must be +1 or -1")

    def value(self, x, y):
        yy = _dot(y, y)
        xx = _dot(x, x)
        xy = _dot(x, y)
        disc = yy - (xx * yy - xy * xy)
        return (_sqrt(disc) + self.sign * xy) / (1.0 - xx)

    def in_domain(self, x) -> bool:
        xx = _value_part(_dot(x, x))
        return bool(np.all(xx < (1.0 - FUNK_MARGIN) ** 2))


@dataclass(frozen=True)
class BryantShen(FinslerMetric):
    """One-parameter family of projectively flat metrics of curvature +1."""

    dim: int
    alpha: float

    def __post_init__(self):
        if not abs(self.alpha) < math.pi / 2:
            raise ValueError("BryantShen parameter must satisfy |alpha| < pi/2")

    def value(self, x, y):
        c2a = math.cos(2 * self.alpha)
        s2a = math.sin(2 * self.alpha)
        yy = _dot(y, y)
        xx = _dot(x, x)
        xy = _dot(x, y)
        b = c2a * yy + xx * yy - xy * xy
        a = b * b + (s2a * yy) * (s2a * yy)
        cc = s2a * xy
        d = xx * xx + 2 * c2a * xx + 1.0
        inv_d = 1.0 / d
        c_over_d = cc * inv_d
        radicand = (_sqrt(a) + b) * inv_d * 0.5 + c_over_d * c_over_d
        if np.any(_value_part(radicand) <= 0.0):
            raise DomainError("BryantShen radicand not positive; y may be zero")
        return _sqrt(radicand) + c_over_d


@dataclass(frozen=True)
class Scaled(FinslerMetric):
    """A positive constant multiple of another metric."""

    base: FinslerMetric
    factor: float

    def __post_init__(self):
        if not self.factor > 0:
            raise ValueError("scale factor must be positive")

    @property
    def dim(self) -> int:
        return self.base.dim

    def value(self, x, y):
        return self.factor * self.base.value(x, y)

    def squared(self, x, y):
        return (self.factor * self.factor) * self.base.squared(x, y)

    def in_domain(self, x) -> bool:
        return self.base.in_domain(x)


# ---------------------------------------------------------------------------
# pointwise operations
# ---------------------------------------------------------------------------


def _validate(metric: FinslerMetric, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape[-1] != metric.dim or y.shape[-1] != metric.dim:
        raise ValueError(f"expected {metric.dim} coordinates")
    if np.any(np.linalg.norm(y, axis=-1) == 0.0):
        raise DegenerateInputError("y = 0 is outside the slit tangent bundle")
    metric.check_domain([x[..., i] for i in range(metric.dim)])
    return x, y


def eval_norm(metric: FinslerMetric, x, y) -> float:
    """F(x, y); positively 1-homogeneous in y."""
    x, y = _validate(metric, x, y)
    n = metric.dim
    return metric.value([x[..., i] for i in range(n)], [y[..., i] for i in range(n)])


def eval_norm_squared(metric: FinslerMetric, x, y) -> float:
    x, y = _validate(metric, x, y)
    return metric.squared(
        [x[..., i] for i in range(metric.dim)],
        [y[..., i] for i in range(metric.dim)],
    )


def fundamental_tensor(metric: FinslerMetric, x, y) -> np.ndarray:
    """g_ij(x, y) = (1/2) d^2 F^2 / dy^i dy^j, shape (..., n, n)."""
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, 0, 2, 2)
    xs = [x[..., i] for i in range(n)]
    h = metric.squared(xs, space.lift_y(y))
    batch = np.shape(h.value)
    g = np.empty(batch + (n, n))
    for i in range(n):
        for j in range(i, n):
            g[..., i, j] = 0.5 * h.deriv_y(i, j)
            g[..., j, i] = g[..., i, j]
    return g


def directional_derivatives(
    metric: FinslerMetric,
    x,
    y,
    order_x: int,
    order_y: int,
    squared: bool = False,
) -> dict[tuple[int, int], np.ndarray]:
    """Exact mixed partials of F (or F^2) at (x, y).

    Returns ``{(a, b): tensor}`` for every a <= order_x, b <= order_y where the
    tensor has ``a`` leading x-indices followed by ``b`` y-indices.
    """
    if not (0 <= order_x <= MAX_ORDER_X and 0 <= order_y <= MAX_ORDER_Y):
        raise CapabilityError(
            f"supported orders are x <= {MAX_ORDER_X}, y <= {MAX_ORDER_Y}"
        )
    x, y = _validate(metric, x, y)
    n = metric.dim
    space = space_for(n, order_x, order_y, order_x + order_y)
    xs = space.lift_x(x) if order_x else [x[..., i] for i in range(n)]
    ys = space.lift_y(y) if order_y else [y[..., i] for i in range(n)]
    f = metric.squared(xs, ys) if squared else metric.value(xs, ys)
    out: dict[tuple[int, int], np.ndarray] = {}
    for a in range(order_x + 1):
        for b in range(order_y + 1):
            shape = (n,) * (a + b)
            tensor = np.empty(np.shape(f.value) + shape)
            for xdirs in np.ndindex(*(n,) * a):
                for ydirs in np.ndindex(*(n,) * b):
                    mono = [0] * (2 * n)
                    for d in xdirs:
                        mono[d] += 1
                    for d in ydirs:
                        mono[n + d] += 1
                    tensor[(...,) + xdirs + ydirs] = f.deriv(mono)
            out[(a, b)] = tensor
    return out
