"""Command-line verification harness.

Subcommands run reproducible check suites over a configured metric and emit a
deterministic ``report.json`` (fixed seed and iteration order; timings are
null unless ``--timings`` is passed).  Exit codes: 0 all checks pass, 1 a
check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, fields, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import holonomy, spherefield
from .curvature import (
    covariant_curvature_residual,
    flag_curvature_residual,
    lambda_fit,
    riemann_curvature,
)
from .errors import DomainError, GeometryError
from .metrics import (
    BryantShen,
    Euclidean,
    Funk,
    Scaled,
    eval_norm,
    fundamental_tensor,
)
from .report import CheckRunner, Report
from .spray import projective_factor, spray_data
from .transport import (
    CoordinateRectangle,
    Polyline,
    curvature_from_loops,
    holonomy_loop_map,
    indicatrix_grid,
    integrate_geodesic,
    loop_curvature_scan,
    map_sample_to_csv,
    parallel_transport,
    trajectory_to_csv,
)

KNOWN_LAMBDA = {"euclidean": 0.0, "funk": -0.25, "bryant-shen": 1.0}


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """One reproducible run: metric, tolerances, sampling and algebra sizes."""

    metric: str = "funk"
    dim: int = 3
    sign: int = 1
    alpha: float = 0.5235987755982988  # pi/6
    scale: float | None = None
    ode_tol: float = 1e-9
    residual_tol: float = 1e-6
    lambda_tol: float = 1e-6
    seed: int = 7
    curvature_samples: int = 60
    sample_radius: float = 0.5
    off_origin_points: int = 5
    grid_points: int = 10
    loop_sides: tuple = (0.2, 0.1, 0.05)
    loop_plane: tuple = (0, 1)
    loop_tol: float = 1e-11
    algebra_n: int = 3
    algebra_c: str = "1/2"
    algebra_lambda: str = "-1/4"
    degree_cap: int = 3
    p_max: int = 3
    bracket_depth_cap: int | None = None
    recursion_length_cap: int = 2

    def __post_init__(self):
        if self.metric not in ("euclidean", "funk", "bryant-shen"):
            raise ConfigError(f"unknown metric kind {self.metric!r}")
        if self.dim < 2:
            raise ConfigError("dim must be >= 2")
        for name in ("ode_tol", "residual_tol", "lambda_tol", "loop_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.metric == "bryant-shen" and not abs(self.alpha) < math.pi / 2:
            raise ConfigError("bryant-shen needs |alpha| < pi/2")
        if self.metric == "funk" and self.sign not in (1, -1):
            raise ConfigError("funk sign must be +1 or -1")
        if self.scale is not None and self.scale <= 0:
            raise ConfigError("scale must be positive")
        object.__setattr__(self, "loop_sides", tuple(float(s) for s in self.loop_sides))
        object.__setattr__(self, "loop_plane", tuple(int(i) for i in self.loop_plane))

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**raw)

    def metric_object(self):
        if self.metric == "euclidean":
            base = Euclidean(self.dim)
        elif self.metric == "funk":
            base = Funk(self.dim, sign=self.sign)
        else:
            base = BryantShen(self.dim, alpha=self.alpha)
        if self.scale is not None:
            return Scaled(base, self.scale)
        return base

    def expected_lambda(self) -> float:
        lam = KNOWN_LAMBDA[self.metric]
        if self.scale is not None:
            lam = lam / (self.scale * self.scale)
        return lam

    def algebra_params(self) -> spherefield.ModelParams:
        return spherefield.ModelParams(
            self.algebra_n, Fraction(self.algebra_c), Fraction(self.algebra_lambda)
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["loop_sides"] = list(self.loop_sides)
        out["loop_plane"] = list(self.loop_plane)
        return out


def _samples(config: RunConfig, metric, count=None):
    rng = np.random.default_rng(config.seed)
    n = metric.dim
    count = count or config.curvature_samples
    X = rng.uniform(-config.sample_radius, config.sample_radius, size=(count, n))
    norms = np.linalg.norm(X, axis=1)
    too_far = norms > config.sample_radius
    X[too_far] *= (config.sample_radius / norms[too_far] * 0.9)[:, None]
    Y = rng.uniform(-1.0, 1.0, size=(count, n))
    Y[np.linalg.norm(Y, axis=1) < 0.3] += 0.5
    return X, Y


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_verify_metric(config: RunConfig, runner: CheckRunner, out_dir) -> None:
    metric = config.metric_object()
    n = metric.dim
    X, Y = _samples(config, metric, count=24)
    x0 = np.zeros(n)

    def homogeneity():
        worst = 0.0
        for x, y in zip(X, Y):
            f1 = eval_norm(metric, x, y)
            for t in (0.5, 2.0, 7.0):
                worst = max(worst, abs(eval_norm(metric, x, t * y) - t * f1) / (t * f1))
        return worst <= 1e-12, worst

    runner.run("norm-positive-homogeneity", "F(x,t*y) = t*F(x,y)", homogeneity)

    def euler():
        worst = 0.0
        for x, y in zip(X, Y):
            g = fundamental_tensor(metric, x, y)
            f2 = eval_norm(metric, x, y) ** 2
            worst = max(worst, abs(y @ g @ y - f2) / f2)
        return worst <= 1e-10, worst

    runner.run("fundamental-tensor-euler-identity", "g_ij y^i y^j = F^2", euler)

    def positive_definite():
        worst = np.inf
        for x, y in zip(X, Y):
            worst = min(worst, float(np.min(np.linalg.eigvalsh(fundamental_tensor(metric, x, y)))))
        return worst > 0.0, worst

    runner.run("fundamental-tensor-positive-definite", "g positive definite on slit bundle", positive_definite)

    rng = np.random.default_rng(config.seed + 1)
    yprobe = rng.uniform(-1, 1, size=n) + 0.1

    def factor_origin():
        pf = projective_factor(metric, x0, yprobe)
        ny = float(np.linalg.norm(yprobe))
        if config.metric == "euclidean":
            expected = 0.0
        elif config.metric == "funk":
            expected = config.sign * ny / 2.0
        else:
            expected = ny * math.sin(config.alpha)
        return abs(pf.P - expected) <= 1e-10 * max(1.0, ny), abs(pf.P - expected)

    runner.run("projective-factor-at-center", "P(0,y) closed form", factor_origin)

    def spray_origin():
        sd = spray_data(metric, x0, yprobe)
        pf = projective_factor(metric, x0, yprobe)
        ny = float(np.linalg.norm(yprobe))
        c = pf.P / ny  # measured projective slope
        Gj = c * (np.outer(yprobe, yprobe) / ny + ny * np.eye(n))
        scale = max(np.max(np.abs(Gj)), 1e-30)
        resid = max(
            float(np.max(np.abs(sd.G - c * ny * yprobe))),
            float(np.max(np.abs(sd.Gj - Gj))),
        )
        return resid <= 1e-8 * max(scale, 1.0), resid

    runner.run("spray-spherical-closed-form", "G = c|y|y, G^i_j = c(y^i y^j/|y| + |y|d_ij)", spray_origin)

    def factor_x_gradient():
        pf = projective_factor(metric, x0, yprobe)
        ny = float(np.linalg.norm(yprobe))
        c = pf.P / ny
        k = eval_norm(metric, x0, yprobe) / ny
        lam = config.expected_lambda()
        expected = (c * c - lam * k * k) * yprobe
        resid = float(np.max(np.abs(pf.dPdx - expected)))
        return resid <= 1e-6 * max(1.0, np.max(np.abs(expected))), resid

    runner.run(
        "projective-factor-base-gradient",
        "dP/dx^m(0,y) = (c^2 - lambda k^2) y^m",
        factor_x_gradient,
    )

    if config.metric == "funk":

        def domain_guard():
            try:
                eval_norm(metric, np.array([1.0 - 1e-10] + [0.0] * (n - 1)), yprobe)
            except DomainError:
                return True, None
            return False, None

        runner.run("disk-domain-guard", "reject |x| >= 1 - 1e-9", domain_guard)

    if config.scale is not None:

        def scaled_exact():
            base = metric.base
            ok = all(
                eval_norm(metric, x, y) == config.scale * eval_norm(base, x, y)
                for x, y in zip(X[:8], Y[:8])
            )
            return ok, None

        runner.run("scaled-norm-exactness", "F_scaled = k * F exactly", scaled_exact)


def cmd_curvature_scan(config: RunConfig, runner: CheckRunner, out_dir) -> None:
    metric = config.metric_object()
    n = metric.dim
    X, Y = _samples(config, metric)

    fit_holder = {}

    def fit():
        lam, resid = lambda_fit(metric, X, Y)
        fit_holder["lam"] = lam
        expected = config.expected_lambda()
        ok = abs(lam - expected) <= config.lambda_tol and resid <= config.residual_tol
        print(f"    lambda fit = {lam:.12f} (expected {expected}), max rel residual {resid:.3e}")
        return ok, resid

    runner.run("constant-curvature-fit", "R = lambda (d^i_k g_jm y^m - d^i_j g_km y^m)", fit)

    def antisym():
        cv = riemann_curvature(metric, X, Y)
        scale = max(float(np.max(np.abs(cv.R))), 1e-30)
        resid = float(np.max(np.abs(cv.R + np.swapaxes(cv.R, -1, -2))))
        return resid <= 1e-10 * max(scale, 1e-10), resid

    runner.run("curvature-antisymmetry", "R^i_jk = -R^i_kj", antisym)

    if config.metric != "euclidean":

        def negative_control():
            lam = fit_holder.get("lam", config.expected_lambda())
            rng = np.random.default_rng(config.seed + 2)
            worst = np.inf
            for _ in range(4):
                x = rng.uniform(-0.4, 0.4, size=n) * 0.9
                y = rng.uniform(-1, 1, size=n) + 0.1
                cv = riemann_curvature(metric, x, y)
                scale = float(np.max(np.abs(cv.R)))
                worst = min(
                    worst, flag_curvature_residual(metric, x, y, lam + 0.5) / scale
                )
            return worst >= 1e-2, worst

        runner.run("wrong-curvature-rejected", "residual bounded away from 0 for wrong lambda", negative_control)

    def parallel_tensor():
        rng = np.random.default_rng(config.seed + 3)
        worst = 0.0
        points = [np.zeros(n)] + [
            rng.uniform(-0.35, 0.35, size=n) for _ in range(config.off_origin_points)
        ]
        for x in points:
            y = rng.uniform(-1, 1, size=n) + 0.1
            for k in range(n):
                worst = max(worst, covariant_curvature_residual(metric, x, y, k))
        return worst <= config.residual_tol, worst

    runner.run("curvature-tensor-parallel", "nabla_k R = 0", parallel_tensor)


def cmd_transport(config: RunConfig, runner: CheckRunner, out_dir) -> None:
    metric = config.metric_object()
    n = metric.dim
    tol = config.ode_tol
    rng = np.random.default_rng(config.seed)
    x0 = np.zeros(n)
    y0 = rng.uniform(-0.5, 0.5, size=n)
    y0 /= 2 * eval_norm(metric, x0, y0)

    traj_holder = {}

    def straightness():
        traj = integrate_geodesic(metric, x0, y0, 1.0, tol=tol)
        traj_holder["traj"] = traj
        unit = y0 / np.linalg.norm(y0)
        off = traj.x - (traj.x @ unit)[:, None] * unit[None, :]
        resid = float(np.max(np.abs(off)))
        # all built-in metrics are projectively flat in this chart
        return resid <= 1e-8, resid

    runner.run("geodesic-straightness", "geodesics are straight lines in the chart", straightness)

    def geodesic_norm():
        traj = traj_holder["traj"]
        return traj.norm_drift <= 10 * tol, traj.norm_drift

    runner.run("geodesic-norm-preservation", "F(x(t), x'(t)) constant", geodesic_norm)

    if out_dir is not None:
        trajectory_to_csv(traj_holder["traj"], Path(out_dir) / "geodesic.csv")

    loop = CoordinateRectangle(
        tuple(x0), config.loop_plane[0], config.loop_plane[1], 0.15, 0.1
    )
    X0 = rng.uniform(-1, 1, size=n) + 0.2

    def norm_preservation():
        res = parallel_transport(metric, loop, X0, tol=tol)
        return res.norm_drift <= 10 * tol, res.norm_drift

    runner.run("transport-norm-preservation", "parallel transport preserves F", norm_preservation)

    path = Polyline((tuple(x0), tuple(0.3 * y0 + 0.1), tuple(0.2 * y0 - 0.05)))

    def composition_inverse():
        out = parallel_transport(metric, path, X0, tol=tol)
        back = parallel_transport(metric, path.reversed(), out.endpoint_vector, tol=tol)
        resid = float(np.linalg.norm(back.endpoint_vector - X0) / np.linalg.norm(X0))
        return resid <= 1e-7, resid

    runner.run("transport-composition-inverse", "transport along c then c reversed is identity", composition_inverse)

    def reparametrization():
        a, b = tuple(x0), tuple(0.25 * y0 + 0.08)
        mid = tuple(0.41 * (np.asarray(b) - np.asarray(a)) + np.asarray(a))
        r1 = parallel_transport(metric, Polyline((a, b)), X0, tol=tol)
        r2 = parallel_transport(metric, Polyline((a, mid, b)), X0, tol=tol)
        resid = float(np.max(np.abs(r1.endpoint_vector - r2.endpoint_vector)))
        return resid <= 1e-8, resid

    runner.run("transport-reparametrization-invariance", "transport depends on the path only", reparametrization)

    def homogeneity():
        base = parallel_transport(metric, path, X0, tol=tol).endpoint_vector
        worst = 0.0
        for t in (0.5, 2.0, 7.0):
            scaled = parallel_transport(metric, path, t * X0, tol=tol).endpoint_vector
            worst = max(worst, float(np.max(np.abs(scaled - t * base)) / (t * np.max(np.abs(base)))))
        return worst <= 1e-9, worst

    runner.run("transport-positive-homogeneity", "tau(t X) = t tau(X)", homogeneity)


def cmd_holonomy_loop(config: RunConfig, runner: CheckRunner, out_dir) -> None:
    metric = config.metric_object()
    n = metric.dim
    x0 = np.zeros(n)
    tol = config.ode_tol
    grid = indicatrix_grid(metric, x0, config.grid_points, seed=config.seed)
    i, j = config.loop_plane
    side = max(config.loop_sides)
    loop = CoordinateRectangle(tuple(x0), i, j, side, side)

    sample_holder = {}

    def loop_norms():
        sample = holonomy_loop_map(metric, x0, loop, grid, tol=tol)
        sample_holder["sample"] = sample
        return sample.norm_drift <= 10 * tol, sample.norm_drift

    runner.run("holonomy-loop-norm-preservation", "indicatrix maps preserve F = 1", loop_norms)

    def degenerate_loop():
        out_back = Polyline((tuple(x0), tuple(x0 + 0.2 * np.eye(n)[i]), tuple(x0)))
        sample = holonomy_loop_map(metric, x0, out_back, grid, tol=tol)
        resid = float(np.max(np.abs(sample.image_points - sample.domain_points)))
        return resid <= 10 * tol, resid

    runner.run("degenerate-loop-identity", "zero-area loops transport trivially", degenerate_loop)

    if out_dir is not None:
        map_sample_to_csv(sample_holder["sample"], Path(out_dir) / "holonomy_loop.csv")


def cmd_loop_curvature(config: RunConfig, runner: CheckRunner, out_dir) -> None:
    metric = config.metric_object()
    n = metric.dim
    x0 = np.zeros(n)
    grid = indicatrix_grid(metric, x0, config.grid_points, seed=config.seed)
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]

    scan_holder = {}

    def convergence():
        sigma, results = loop_curvature_scan(
            metric, x0, pairs, config.loop_sides, grid, tol=config.loop_tol
        )
        scan_holder.update(sigma=sigma, results=results)
        res = results[pairs[0]]
        print(f"    sigma = {sigma:+d}, slope = {res.slope:.2f}, rel err at s={res.sides[-1]} = {res.rel_errors[-1]:.3e}")
        if config.metric == "euclidean":
            flat = max(float(np.max(np.abs(r.estimates[-1]))) for r in results.values())
            return flat <= 1e-6, flat
        ok = all(r.rel_errors[-1] <= 1e-2 for r in results.values())
        ok = ok and all(r.slope >= 0.8 for r in results.values())
        return ok, max(r.rel_errors[-1] for r in results.values())

    runner.run(
        "loop-shrinking-curvature",
        "(holonomy - id)/s^2 converges to sigma * xi_ij",
        convergence,
    )

    def antisymmetry():
        i, j = pairs[0]
        a = scan_holder["results"][(i, j)]
        b = curvature_from_loops(metric, x0, j, i, config.loop_sides, grid, tol=config.loop_tol)
        resid = float(np.max(np.abs(a.estimates[-1] + b.estimates[-1])))
        scale = max(float(np.max(np.abs(a.estimates[-1]))), 1e-30)
        return resid <= 1e-4 * max(1.0, scale), resid

    runner.run("loop-orientation-antisymmetry", "reversing the loop flips the generator", antisymmetry)

    if out_dir is not None and "results" in scan_holder:
        import csv as _csv

        with open(Path(out_dir) / "loop_curvature.csv", "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["i", "j", "side", "rel_error", "sigma", "slope"])
            for (i, j), res in scan_holder["results"].items():
                for s, err in zip(res.sides, res.rel_errors):
                    writer.writerow([i + 1, j + 1, s, repr(err), res.sigma, repr(res.slope)])


def cmd_algebra(config: RunConfig, runner: CheckRunner, out_dir) -> None:
    params = config.algebra_params()
    n = params.n

    def structure_constants():
        ok = True
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if len({i, j, k}) != 3:
                        continue
                    lhs = spherefield.lie_bracket(
                        spherefield.rotation_field(params, i, j),
                        spherefield.rotation_field(params, j, k),
                    )
                    ok = ok and lhs == params.lam * spherefield.rotation_field(params, i, k)
        if n >= 4:
            lhs = spherefield.lie_bracket(
                spherefield.rotation_field(params, 0, 1),
                spherefield.rotation_field(params, 2, 3),
            )
            ok = ok and lhs.is_zero
        return ok, None

    runner.run("rotation-structure-constants", "[xi_ij, xi_jk] = lambda xi_ik; disjoint pairs commute", structure_constants)

    def cyclic():
        ok = True
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if len({i, j, k}) != 3:
                        continue
                    rel = (
                        spherefield.monomial_times_field(_unit_mono(n, i), spherefield.rotation_field(params, j, k))
                        + spherefield.monomial_times_field(_unit_mono(n, j), spherefield.rotation_field(params, k, i))
                        + spherefield.monomial_times_field(_unit_mono(n, k), spherefield.rotation_field(params, i, j))
                    )
                    ok = ok and rel.is_zero
        return ok, None

    runner.run("cyclic-relation", "y^i xi_jk + y^j xi_ki + y^k xi_ij = 0", cyclic)

    def liouville():
        ok = all(spherefield.liouville_identity_check(params, k)[0] for k in range(n))
        return ok, None

    runner.run("liouville-contraction-identity", "sum_s y^s xi_ks = lambda(y^k C - |y|^2 d_k)", liouville)

    def nabla_consistency():
        ok = True
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    closed = spherefield.curvature_derivative_field(params, k, i, j)
                    composed = spherefield.curvature_derivative_from_connection(params, k, i, j)
                    ok = ok and closed == composed
                    if len({i, j, k}) == 3:
                        direct = 2 * params.c * spherefield.monomial_times_field(
                            _unit_mono(n, k), spherefield.rotation_field(params, i, j)
                        )
                        ok = ok and closed == direct
        return ok, None

    runner.run("covariant-derivative-closed-form", "nabla_k xi_ij via connection coefficients", nabla_consistency)

    def second_specializations():
        ok = True
        c2 = params.c * params.c
        for m in range(n):
            for k in range(n):
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            continue
                        general = spherefield.curvature_second_derivative_field(params, m, k, i, j)
                        if len({m, k, i, j}) == 4:
                            mono = tuple(
                                (1 if v == m else 0) + (1 if v == k else 0) for v in range(n)
                            )
                            expected = 4 * c2 * spherefield.monomial_times_field(
                                mono, spherefield.rotation_field(params, i, j)
                            )
                            ok = ok and general == expected
                        if m == k and len({k, i, j}) == 3:
                            mono = tuple(2 if v == k else 0 for v in range(n))
                            expected = 2 * (c2 - params.lam) * spherefield.rotation_field(params, i, j) + 4 * c2 * spherefield.monomial_times_field(
                                mono, spherefield.rotation_field(params, i, j)
                            )
                            ok = ok and general == expected
        return ok, None

    runner.run("second-derivative-specializations", "index-pattern reductions of nabla_m nabla_k xi_ij", second_specializations)

    def recursions():
        ok = True
        for length in range(1, config.recursion_length_cap + 1):
            for mono in holonomy.multi_indices(n, length):
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            continue
                        for k in range(n):
                            good, _, _ = spherefield.bracket_recursion_check(params, mono, i, j, k)
                            ok = ok and good
        return ok, None

    runner.run("bracket-recursions", "[y^m xi_ij, sum_s y^s xi_ks] closed forms", recursions)

    def determinants():
        ok = True
        for size in range(2, 7):
            ok = ok and holonomy.exact_determinant(holonomy.first_order_system_matrix(size)) == 2 ** (size - 2) * (size + 1)
            ok = ok and holonomy.exact_determinant(holonomy.second_order_system_matrix(size)) == size
        return ok, None

    runner.run("system-determinants", "det(2I+J) = 2^(n-2)(n+1), det(I+J) = n", determinants)

    def recovery():
        if params.c == 0 or params.lam == 0:
            return True, None
        for j in range(n):
            holonomy.solve_first_derivative_system(params, j)
            for k in range(n):
                if k != j:
                    holonomy.solve_second_derivative_system(params, k, j)
        return True, None

    runner.run("derivative-system-recovery", "linear systems recover y^i xi_ij and y^k y^i xi_ij", recovery)

    cert = holonomy.density_certificate(
        params, config.p_max, config.degree_cap, config.bracket_depth_cap
    )
    print(cert.table())
    if cert.degenerate:
        runner.add(
            "density-certificate",
            "generated rank equals monomial-module rank per degree",
            "degenerate",
        )
    else:

        def certificate():
            return cert.passed, None

        runner.run("density-certificate", "generated rank equals monomial-module rank per degree", certificate)

    if out_dir is not None:
        payload = {
            "n": params.n,
            "c": str(params.c),
            "lambda": str(params.lam),
            "p_max": cert.p_max,
            "degenerate": cert.degenerate,
            "truncated": cert.truncated,
            "pass": cert.passed,
            "witness": cert.witness,
            "rows": [
                {
                    "p": r.p,
                    "generated_rank": r.generated_rank,
                    "target_rank": r.target_rank,
                    "pass": r.passed,
                }
                for r in cert.rows
            ],
        }
        with open(Path(out_dir) / "density_certificate.json", "w") as fh:
            fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
        import csv as _csv

        with open(Path(out_dir) / "density_certificate.csv", "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(["p", "generated_rank", "target_rank", "pass"])
            for r in cert.rows:
                writer.writerow([r.p, r.generated_rank, r.target_rank, r.passed])


def _unit_mono(n, k):
    return tuple(1 if v == k else 0 for v in range(n))


COMMANDS = {
    "verify-metric": cmd_verify_metric,
    "curvature-scan": cmd_curvature_scan,
    "transport": cmd_transport,
    "holonomy-loop": cmd_holonomy_loop,
    "loop-curvature": cmd_loop_curvature,
    "algebra": cmd_algebra,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finslerhol",
        description="Verification harness for projectively flat Finsler metrics: "
        "sprays, curvature, parallel transport and the generated algebra of "
        "curvature fields on the indicatrix sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override sampling seed")
        p.add_argument("--json", action="store_true", help="print the report JSON to stdout")
        p.add_argument("--timings", action="store_true", help="record per-check runtimes")
        p.add_argument("--metric", type=str, default=None, choices=["euclidean", "funk", "bryant-shen"])
        p.add_argument("--dim", type=int, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--sign", type=int, default=None, choices=[1, -1])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = RunConfig.from_file(args.config) if args.config else RunConfig()
        overrides = {
            key: getattr(args, key)
            for key in ("seed", "metric", "dim", "alpha", "sign")
            if getattr(args, key) is not None
        }
        if overrides:
            config = replace(config, **overrides)
    except (ConfigError, TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out_dir = None
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)

    report = Report(command=args.command, config=config.to_dict())
    runner = CheckRunner(report, timings=args.timings)
    print(f"[{args.command}] metric={config.metric} dim={config.dim} seed={config.seed}")
    try:
        COMMANDS[args.command](config, runner, out_dir)
    except (ConfigError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if out_dir is not None:
        report.write(out_dir / "report.json")
    if args.json:
        sys.stdout.write(report.to_json())
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
