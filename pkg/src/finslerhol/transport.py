"""Geodesics, nonlinear parallel transport and loop holonomy on the indicatrix.

Transport integrates ``dX^i/dt + G^i_j(c(t), X(t)) c'(t)^j = 0`` with an
adaptive RK45; the transported vector's Finsler norm is conserved exactly by
the equation, so the observed drift is a pure integration diagnostic and is
never hidden by renormalization.  Whole grids of indicatrix vectors are
transported in one batched solve.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .curvature import curvature_vector_field
from .errors import (
    ConventionMismatchError,
    DegenerateInputError,
    StiffnessError,
)
from .jets import space_for
from .metrics import FinslerMetric, Funk, eval_norm
from .spray import _spray_series

__all__ = [
    "Polyline",
    "CoordinateRectangle",
    "ParametricCurve",
    "TransportResult",
    "GeodesicTrajectory",
    "IndicatrixMapSample",
    "LoopCurvatureResult",
    "integrate_geodesic",
    "parallel_transport",
    "holonomy_loop_map",
    "curvature_from_loops",
    "loop_curvature_scan",
    "indicatrix_grid",
    "trajectory_to_csv",
    "map_sample_to_csv",
]

GEODESIC_CAPS = (1, 2, 2)
TRANSPORT_CAPS = (1, 3, 3)
CLOSURE_TOL = 1e-12
DEFAULT_TOL = 1e-9


# ---------------------------------------------------------------------------
# curve specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polyline:
    """Piecewise-linear curve through the given vertices."""

    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(float(c) for c in v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2:
            raise ValueError("polyline needs at least two vertices")
        for a, b in zip(verts, verts[1:]):
            if max(abs(p - q) for p, q in zip(a, b)) == 0.0:
                raise ValueError("consecutive polyline vertices must be distinct")

    def segments(self):
        out = []
        for a, b in zip(self.vertices, self.vertices[1:]):
            a = np.asarray(a)
            b = np.asarray(b)
            out.append((lambda t, a=a, b=b: a + t * (b - a), lambda t, a=a, b=b: b - a))
        return out

    def reversed(self) -> "Polyline":
        return Polyline(self.vertices[::-1])

    @property
    def start(self):
        return np.asarray(self.vertices[0])

    @property
    def end(self):
        return np.asarray(self.vertices[-1])


@dataclass(frozen=True)
class CoordinateRectangle:
    """Rectangle loop in the (i, j) coordinate plane, counterclockwise when
    ``orientation`` is +1, starting and ending at ``corner``."""

    corner: tuple
    i: int
    j: int
    side_i: float
    side_j: float
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "corner", tuple(float(c) for c in self.corner))
        if self.side_i <= 0 or self.side_j <= 0:
            raise ValueError("rectangle sides must be positive")
        if self.i == self.j:
            raise ValueError("rectangle needs two distinct coordinate axes")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def as_polyline(self) -> Polyline:
        c = np.asarray(self.corner)
        ei = np.zeros(len(c))
        ej = np.zeros(len(c))
        ei[self.i] = self.side_i
        ej[self.j] = self.side_j
        ring = [c, c + ei, c + ei + ej, c + ej, c]
        if self.orientation == -1:
            ring = ring[::-1]
        return Polyline(tuple(tuple(v) for v in ring))

    def segments(self):
        return self.as_polyline().segments()

    def reversed(self) -> "CoordinateRectangle":
        return CoordinateRectangle(
            self.corner, self.i, self.j, self.side_i, self.side_j, -self.orientation
        )

    @property
    def start(self):
        return np.asarray(self.corner)

    end = start


@dataclass(frozen=True)
class ParametricCurve:
    """Sampled curve with derivatives; interpolated by a cubic Hermite spline."""

    times: tuple
    points: tuple
    derivatives: tuple

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(
            self, "points", tuple(tuple(float(c) for c in p) for p in self.points)
        )
        object.__setattr__(
            self,
            "derivatives",
            tuple(tuple(float(c) for c in d) for d in self.derivatives),
        )
        if not (len(self.times) == len(self.points) == len(self.derivatives) >= 2):
            raise ValueError("need matching times, points and derivatives")

    def _spline(self):
        return CubicHermiteSpline(
            np.asarray(self.times), np.asarray(self.points), np.asarray(self.derivatives)
        )

    def segments(self):
        spline = self._spline()
        dspline = spline.derivative()
        t0, t1 = self.times[0], self.times[-1]

        def pos(t):
            return spline(t0 + t * (t1 - t0))

        def vel(t):
            return dspline(t0 + t * (t1 - t0)) * (t1 - t0)

        return [(pos, vel)]

    def reversed(self) -> "ParametricCurve":
        t1 = self.times[-1]
        times = tuple(t1 - t for t in self.times[::-1])
        points = self.points[::-1]
        derivs = tuple(tuple(-c for c in d) for d in self.derivatives[::-1])
        return ParametricCurve(times, points, derivs)

    @property
    def start(self):
        return np.asarray(self.points[0])

    @property
    def end(self):
        return np.asarray(self.points[-1])


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransportResult:
    endpoint_vector: np.ndarray
    norm_drift: float
    step_count: int
    estimated_error: float


@dataclass(frozen=True)
class GeodesicTrajectory:
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    norm_drift: float
    domain_exit: bool
    step_count: int


@dataclass(frozen=True)
class IndicatrixMapSample:
    domain_points: np.ndarray
    image_points: np.ndarray
    norm_drift: float
    step_count: int
    failed_indices: tuple = ()


@dataclass(frozen=True)
class LoopCurvatureResult:
    sides: tuple
    estimates: tuple  # per side: (grid, n) array D(s)
    reference: np.ndarray  # curvature field values on the grid
    sigma: int
    rel_errors: tuple
    slope: float
    fitted_generator: np.ndarray = field(repr=False, default=None)


# ---------------------------------------------------------------------------
# fast connection evaluations for ODE right-hand sides
# ---------------------------------------------------------------------------


def _spray_values(metric, x, Y):
    """G^i(x, Y_b) for a batch of fiber vectors at a common base point."""
    n = metric.dim
    space = space_for(n, *GEODESIC_CAPS)
    xs = space.lift_x(np.asarray(x, dtype=float))
    ys = space.lift_y(np.asarray(Y, dtype=float))
    _, _, TG = _spray_series(metric, xs, ys)
    return np.stack([np.asarray(TG[i].value) for i in range(n)], axis=-1)


def _connection_values(metric, x, Y):
    """G^i_j(x, Y_b), shape (..., n, n)."""
    n = metric.dim
    space = space_for(n, *TRANSPORT_CAPS)
    xs = space.lift_x(np.asarray(x, dtype=float))
    ys = space.lift_y(np.asarray(Y, dtype=float))
    _, _, TG = _spray_series(metric, xs, ys)
    batch = np.shape(TG[0].value)
    Gj = np.empty(batch + (n, n))
    for i in range(n):
        for j in range(n):
            Gj[..., i, j] = TG[i].deriv_y(j)
    return Gj


# ---------------------------------------------------------------------------
# geodesics
# ---------------------------------------------------------------------------


def integrate_geodesic(
    metric: FinslerMetric,
    x0,
    y0,
    t_end: float,
    tol: float = DEFAULT_TOL,
    samples: int | None = None,
) -> GeodesicTrajectory:
    """Integrate x'' + 2G(x, x') = 0 from (x0, y0) up to t_end.

    ``samples`` requests that many equispaced output times (the integrator's
    dense interpolant); by default the accepted steps are returned.
    """
    x0 = np.asarray(x0, dtype=float)
    y0 = np.asarray(y0, dtype=float)
    n = metric.dim
    if np.linalg.norm(y0) == 0.0:
        raise DegenerateInputError("geodesic needs a nonzero initial velocity")
    metric.check_domain(list(x0))

    def rhs(t, state):
        x = state[:n]
        v = state[n:]
        G = _spray_values(metric, x, v)
        return np.concatenate([v, -2.0 * G])

    events = []
    if isinstance(_base_metric(metric), Funk):
        # stop strictly inside the |x| < 1 - 1e-9 guard so the exit point is valid
        limit = (1.0 - 2e-9) ** 2

        def domain_event(t, state):
            return limit - float(np.dot(state[:n], state[:n]))

        domain_event.terminal = True
        domain_event.direction = -1
        events.append(domain_event)

    sol = solve_ivp(
        rhs,
        (0.0, t_end),
        np.concatenate([x0, y0]),
        method="RK45",
        rtol=tol,
        atol=tol * 1e-3,
        events=events or None,
        t_eval=np.linspace(0.0, t_end, samples) if samples else None,
    )
    if sol.status == -1:
        raise StiffnessError(sol.message)
    domain_exit = sol.status == 1
    xs = sol.y[:n].T
    vs = sol.y[n:].T
    f0 = eval_norm(metric, x0, y0)
    f1 = eval_norm(metric, xs[-1], vs[-1])
    drift = abs(f1 - f0) / f0
    return GeodesicTrajectory(
        t=sol.t,
        x=xs,
        v=vs,
        norm_drift=float(drift),
        domain_exit=domain_exit,
        step_count=len(sol.t) - 1,
    )


def _base_metric(metric):
    seen = metric
    while hasattr(seen, "base"):
        seen = seen.base
    return seen


# ---------------------------------------------------------------------------
# parallel transport
# ---------------------------------------------------------------------------


def _check_curve_domain(metric, curve):
    for pos, _ in curve.segments():
        for t in np.linspace(0.0, 1.0, 9):
            metric.check_domain(list(np.atleast_1d(pos(t))))


def _transport_batch(metric, curve, X0, tol):
    """Transport a (B, n) batch of vectors along the curve; returns (X1, steps)."""
    n = metric.dim
    X = np.array(X0, dtype=float)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    B = X.shape[0]
    start = np.asarray(curve.start, dtype=float)
    f0 = np.array([eval_norm(metric, start, X[b]) for b in range(B)])
    floor = 1e-8 * float(np.min(f0))
    _check_curve_domain(metric, curve)
    steps = 0
    xcur = start
    for pos, vel in curve.segments():

        def rhs(t, state):
            Y = state.reshape(B, n)
            Gj = _connection_values(metric, pos(t), Y)
            dY = -np.einsum("bij,j->bi", Gj, np.asarray(vel(t), dtype=float))
            return dY.ravel()

        def degeneracy_event(t, state):
            Y = state.reshape(B, n)
            x = pos(t)
            vals = [eval_norm(metric, x, Y[b]) for b in range(B)]
            return float(min(vals)) - floor

        degeneracy_event.terminal = True

        sol = solve_ivp(
            rhs,
            (0.0, 1.0),
            X.ravel(),
            method="RK45",
            rtol=tol,
            atol=tol * 1e-3,
            events=[degeneracy_event],
        )
        if sol.status == -1:
            raise StiffnessError(sol.message)
        if sol.status == 1:
            raise DegenerateInputError(
                "transported vector approached the zero section"
            )
        X = sol.y[:, -1].reshape(B, n)
        steps += len(sol.t) - 1
        xcur = np.asarray(pos(1.0), dtype=float)
    f1 = np.array([eval_norm(metric, xcur, X[b]) for b in range(B)])
    drift = float(np.max(np.abs(f1 - f0) / f0))
    return (X[0] if single else X), steps, drift


def parallel_transport(
    metric: FinslerMetric, curve, X0, tol: float = DEFAULT_TOL
) -> TransportResult:
    """Parallel transport of X0 along the curve with respect to G^i_j."""
    X0 = np.asarray(X0, dtype=float)
    if np.linalg.norm(X0) == 0.0:
        raise DegenerateInputError("cannot transport the zero vector")
    X1, steps, drift = _transport_batch(metric, curve, X0, tol)
    return TransportResult(
        endpoint_vector=X1,
        norm_drift=drift,
        step_count=steps,
        estimated_error=tol * max(steps, 1),
    )


def holonomy_loop_map(
    metric: FinslerMetric, x0, loop, grid, tol: float = DEFAULT_TOL
) -> IndicatrixMapSample:
    """Transport every grid vector around a closed loop based at x0.

    Norm preservation is checked (reported as ``norm_drift``), never enforced.
    If the batched solve degenerates, each vector is retried on its own and
    the offenders are reported in ``failed_indices`` (their image rows are
    NaN) instead of failing the whole map.
    """
    x0 = np.asarray(x0, dtype=float)
    if np.max(np.abs(np.asarray(loop.start) - x0)) > CLOSURE_TOL:
        raise ValueError("loop must be based at x0")
    if np.max(np.abs(np.asarray(loop.start) - np.asarray(loop.end))) > CLOSURE_TOL:
        raise ValueError("loop is not closed")
    grid = np.asarray(grid, dtype=float)
    try:
        images, steps, drift = _transport_batch(metric, loop, grid, tol)
        failed: tuple = ()
    except DegenerateInputError:
        images = np.full_like(grid, np.nan)
        steps = 0
        drift = 0.0
        bad = []
        for b in range(len(grid)):
            try:
                img, st, dr = _transport_batch(metric, loop, grid[b], tol)
            except DegenerateInputError:
                bad.append(b)
                continue
            images[b] = img
            steps += st
            drift = max(drift, dr)
        failed = tuple(bad)
    return IndicatrixMapSample(
        domain_points=grid,
        image_points=images,
        norm_drift=drift,
        step_count=steps,
        failed_indices=failed,
    )


def indicatrix_grid(metric: FinslerMetric, x0, count: int, seed: int = 0) -> np.ndarray:
    """Quasi-uniform sample of the indicatrix {F(x0, .) = 1}.

    Directions come from equispaced angles (n=2), a Fibonacci sphere (n=3) or
    a seeded Gaussian draw (n >= 4), then each is rescaled to unit F-norm.
    """
    n = metric.dim
    x0 = np.asarray(x0, dtype=float)
    if n == 2:
        angles = 2 * np.pi * np.arange(count) / count
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    elif n == 3:
        k = np.arange(count) + 0.5
        phi = math.pi * (3.0 - math.sqrt(5.0)) * k
        z = 1.0 - 2.0 * k / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        dirs = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
    else:
        rng = np.random.default_rng(seed)
        dirs = rng.normal(size=(count, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    norms = np.array([eval_norm(metric, x0, d) for d in dirs])
    return dirs / norms[:, None]


def _quadrant_loop(x0, i, j, si, sj):
    """Rectangle loop based at x0 with signed sides si, sj along axes i, j."""
    n = len(x0)
    a = np.zeros(n)
    b = np.zeros(n)
    a[i] = si
    b[j] = sj
    ring = (tuple(x0), tuple(x0 + a), tuple(x0 + a + b), tuple(x0 + b), tuple(x0))
    return Polyline(ring)


def curvature_from_loops(
    metric: FinslerMetric,
    x0,
    i: int,
    j: int,
    sides,
    grid,
    tol: float = DEFAULT_TOL,
) -> LoopCurvatureResult:
    """Estimate the curvature vector field from shrinking rectangle loops.

    For each side length s, the four corner-based rectangle loops around x0
    (one per coordinate quadrant, weighted by loop orientation = the sign of
    the enclosed area) are averaged; the odd moments of the loop position
    cancel, so ``D(s) = (holonomy - id)/s^2`` converges to ``sigma * xi_ij``
    at second order in s.  The sign ``sigma`` is measured from the data.
    """
    x0 = np.asarray(x0, dtype=float)
    sides = tuple(sorted((float(s) for s in sides), reverse=True))
    grid = np.asarray(grid, dtype=float)
    estimates = []
    for s in sides:
        acc = np.zeros_like(grid)
        for si in (s, -s):
            for sj in (s, -s):
                loop = _quadrant_loop(x0, i, j, si, sj)
                sample = holonomy_loop_map(metric, x0, loop, grid, tol)
                orientation = 1.0 if si * sj > 0 else -1.0
                acc += orientation * (sample.image_points - sample.domain_points)
        estimates.append(acc / (4.0 * s * s))
    ref_field = curvature_vector_field(metric, x0, i, j)
    reference = np.stack([ref_field(g) for g in grid])
    ref_norm = float(np.max(np.abs(reference)))
    if ref_norm == 0.0:
        sigma = 1
        rel_errors = tuple(float(np.max(np.abs(d))) for d in estimates)
        slope = float("nan")
    else:
        smallest = estimates[-1]
        inner = float(np.sum(smallest * reference))
        if inner == 0.0:
            raise ConventionMismatchError("loop estimate is orthogonal to xi_ij")
        sigma = 1 if inner > 0 else -1
        rel_errors = tuple(
            float(np.max(np.abs(d - sigma * reference)) / ref_norm) for d in estimates
        )
        errs = np.array(
            [max(np.max(np.abs(d - sigma * reference)), 1e-300) for d in estimates]
        )
        slope = float(np.polyfit(np.log(np.asarray(sides)), np.log(errs), 1)[0])
    return LoopCurvatureResult(
        sides=sides,
        estimates=tuple(estimates),
        reference=reference,
        sigma=sigma,
        rel_errors=rel_errors,
        slope=slope,
        fitted_generator=estimates[-1],
    )


def loop_curvature_scan(metric, x0, pairs, sides, grid, tol: float = DEFAULT_TOL):
    """Run curvature_from_loops over index pairs; sigma must be consistent."""
    results = {}
    sigma = None
    for (i, j) in pairs:
        res = curvature_from_loops(metric, x0, i, j, sides, grid, tol)
        results[(i, j)] = res
        if sigma is None:
            sigma = res.sigma
        elif res.sigma != sigma:
            raise ConventionMismatchError(
                f"pair {(i, j)} produced sign {res.sigma}, expected {sigma}"
            )
    return sigma, results


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def trajectory_to_csv(traj: GeodesicTrajectory, path):
    n = traj.x.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["t"] + [f"x{i + 1}" for i in range(n)] + [f"v{i + 1}" for i in range(n)]
        )
        for k in range(len(traj.t)):
            writer.writerow(
                [repr(float(traj.t[k]))]
                + [repr(float(v)) for v in traj.x[k]]
                + [repr(float(v)) for v in traj.v[k]]
            )


def map_sample_to_csv(sample: IndicatrixMapSample, path):
    n = sample.domain_points.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["grid_index"]
            + [f"y{i + 1}" for i in range(n)]
            + [f"image{i + 1}" for i in range(n)]
        )
        for k in range(len(sample.domain_points)):
            writer.writerow(
                [k]
                + [repr(float(v)) for v in sample.domain_points[k]]
                + [repr(float(v)) for v in sample.image_points[k]]
            )
