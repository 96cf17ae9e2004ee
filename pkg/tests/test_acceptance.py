"""Acceptance suite: one test per criterion, each at its pinned tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see the per-criterion
pass/fail lines.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from finslerhol.curvature import (
    covariant_curvature_residual,
    curvature_field_xy_map,
    lambda_fit,
)
from finslerhol.holonomy import (
    density_certificate,
    exact_determinant,
    first_order_system_matrix,
    monomial_module_dimension,
    second_order_system_matrix,
    solve_first_derivative_system,
    solve_second_derivative_system,
    multi_indices,
)
from finslerhol.metrics import BryantShen, Funk, eval_norm
from finslerhol.spherefield import (
    ModelParams,
    bracket_recursion_check,
    contracted_rotation,
    curvature_derivative_field,
    curvature_derivative_from_connection,
    curvature_second_derivative_field,
    lie_bracket,
    liouville_identity_check,
    monomial_times_field,
    rotation_field,
)
from finslerhol.spray import (
    berwald_covariant_derivative,
    connection_x_derivatives,
    projective_factor,
    spray_data,
)
from finslerhol.transport import (
    CoordinateRectangle,
    Polyline,
    indicatrix_grid,
    integrate_geodesic,
    loop_curvature_scan,
    parallel_transport,
)

FUNK_LAMBDA = -0.25


def report(num: int, ok: bool, detail: str) -> None:
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} - {detail}")


def curvature_samples(n, count, radius, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-radius, radius, size=(count, n))
    norms = np.linalg.norm(X, axis=1)
    over = norms > radius
    X[over] *= (radius / norms[over] * 0.95)[:, None]
    Y = rng.uniform(-1.0, 1.0, size=(count, n))
    Y[np.linalg.norm(Y, axis=1) < 0.3] += 0.5
    return X, Y


def test_criterion_1_funk_constant_curvature():
    # lambda fit = -0.25 +- 1e-6 over >= 200 samples with |x| <= 0.6 for
    # n in {2, 3, 4}; max relative tensor residual <= 1e-6; runtime <= 30 s
    start = time.perf_counter()
    worst_gap = 0.0
    worst_resid = 0.0
    for n in (2, 3, 4):
        X, Y = curvature_samples(n, 200, 0.6, seed=101 + n)
        lam, resid = lambda_fit(Funk(n), X, Y)
        worst_gap = max(worst_gap, abs(lam - FUNK_LAMBDA))
        worst_resid = max(worst_resid, resid)
    elapsed = time.perf_counter() - start
    ok = worst_gap <= 1e-6 and worst_resid <= 1e-6 and elapsed <= 30.0
    report(
        1,
        ok,
        f"funk lambda gap {worst_gap:.2e} (tol 1e-6), residual {worst_resid:.2e} "
        f"(tol 1e-6), runtime {elapsed:.1f}s (limit 30s)",
    )
    assert worst_gap <= 1e-6
    assert worst_resid <= 1e-6
    assert elapsed <= 30.0


def test_criterion_2_bryant_shen_constant_curvature():
    # lambda fit = 1 +- 1e-5 for alpha in {pi/6, pi/4}, n in {2, 3}; <= 60 s
    start = time.perf_counter()
    worst_gap = 0.0
    for alpha in (math.pi / 6, math.pi / 4):
        for n in (2, 3):
            X, Y = curvature_samples(n, 100, 0.5, seed=211 + n)
            lam, resid = lambda_fit(BryantShen(n, alpha=alpha), X, Y)
            worst_gap = max(worst_gap, abs(lam - 1.0))
    elapsed = time.perf_counter() - start
    ok = worst_gap <= 1e-5 and elapsed <= 60.0
    report(2, ok, f"bryant-shen lambda gap {worst_gap:.2e} (tol 1e-5), runtime {elapsed:.1f}s (limit 60s)")
    assert worst_gap <= 1e-5
    assert elapsed <= 60.0


def test_criterion_3_curvature_tensor_is_parallel():
    # nabla_k residual <= 1e-6 for both metrics at the center and at 20
    # random off-center points
    rng = np.random.default_rng(303)
    worst = 0.0
    for metric in (Funk(3), BryantShen(3, alpha=math.pi / 6)):
        points = [np.zeros(3)] + [rng.uniform(-0.3, 0.3, size=3) for _ in range(20)]
        for idx, x in enumerate(points):
            y = rng.uniform(-1, 1, size=3) + 0.1
            ks = range(3) if idx == 0 else [int(rng.integers(0, 3))]
            for k in ks:
                worst = max(worst, covariant_curvature_residual(metric, x, y, k))
    ok = worst <= 1e-6
    report(3, ok, f"max nabla-curvature residual {worst:.2e} (tol 1e-6)")
    assert worst <= 1e-6


def test_criterion_4_spherically_symmetric_closed_forms():
    # G, G^i_j, G^i_jk closed forms with c = sign/2 to rel 1e-8;
    # dG^i_k/dx^m = (c^2 - lambda)(y^i d^m_k + y^m d^i_k) with c^2-lambda = 1/2
    # to rel 1e-6; both Funk signs, n in {2, 3, 4}
    rng = np.random.default_rng(404)
    worst_spray = 0.0
    worst_dx = 0.0
    for n in (2, 3, 4):
        eye = np.eye(n)
        for sign in (1, -1):
            metric = Funk(n, sign=sign)
            c = sign / 2.0
            y = rng.uniform(-1, 1, size=n) + 0.2
            ny = np.linalg.norm(y)
            sd = spray_data(metric, np.zeros(n), y)
            G = c * ny * y
            Gj = c * (np.outer(y, y) / ny + ny * eye)
            Gjk = c * (
                np.einsum("i,jk->ijk", y, eye) / ny
                + np.einsum("j,ik->ijk", y, eye) / ny
                + np.einsum("k,ij->ijk", y, eye) / ny
                - np.einsum("i,j,k->ijk", y, y, y) / ny**3
            )
            scale = max(np.max(np.abs(Gj)), np.max(np.abs(Gjk)))
            worst_spray = max(
                worst_spray,
                np.max(np.abs(sd.G - G)) / scale,
                np.max(np.abs(sd.Gj - Gj)) / scale,
                np.max(np.abs(sd.Gjk - Gjk)) / scale,
            )
            dGj = connection_x_derivatives(metric, np.zeros(n), y)
            expected = 0.5 * (
                np.einsum("i,mk->ikm", y, eye) + np.einsum("m,ik->ikm", y, eye)
            )
            worst_dx = max(
                worst_dx, np.max(np.abs(dGj - expected)) / np.max(np.abs(expected))
            )
    ok = worst_spray <= 1e-8 and worst_dx <= 1e-6
    report(
        4,
        ok,
        f"spray closed-form residual {worst_spray:.2e} (tol 1e-8), "
        f"connection x-derivative residual {worst_dx:.2e} (tol 1e-6)",
    )
    assert worst_spray <= 1e-8
    assert worst_dx <= 1e-6


def test_criterion_5_transport_invariants():
    # standard loop suite: norm drift <= 1e-8, composition-inverse <= 1e-7,
    # geodesic straightness <= 1e-8
    metric = Funk(3)
    tol = 1e-9
    rng = np.random.default_rng(505)
    loops = [
        CoordinateRectangle((0.0, 0.0, 0.0), 0, 1, 0.1, 0.1),
        CoordinateRectangle((0.0, 0.0, 0.0), 0, 2, 0.05, 0.05),
        Polyline(((0.0, 0.0, 0.0), (0.2, 0.05, 0.0), (0.05, 0.2, 0.1), (0.0, 0.0, 0.0))),
    ]
    worst_drift = 0.0
    for loop in loops:
        for _ in range(2):
            X0 = rng.uniform(-1, 1, size=3) + 0.2
            res = parallel_transport(metric, loop, X0, tol=tol)
            worst_drift = max(worst_drift, res.norm_drift)

    paths = [
        Polyline(((0.0, 0.0, 0.0), (0.25, 0.1, -0.05))),
        Polyline(((0.0, 0.0, 0.0), (0.15, -0.1, 0.2), (0.3, 0.05, 0.1))),
    ]
    worst_inverse = 0.0
    for path in paths:
        X0 = rng.uniform(-1, 1, size=3) + 0.2
        fwd = parallel_transport(metric, path, X0, tol=1e-10)
        back = parallel_transport(metric, path.reversed(), fwd.endpoint_vector, tol=1e-10)
        worst_inverse = max(
            worst_inverse,
            float(np.linalg.norm(back.endpoint_vector - X0) / np.linalg.norm(X0)),
        )

    worst_line = 0.0
    for _ in range(2):
        y0 = rng.uniform(-0.5, 0.5, size=3)
        y0 /= 4 * np.linalg.norm(y0)
        traj = integrate_geodesic(metric, np.zeros(3), y0, 1.0, tol=1e-10)
        unit = y0 / np.linalg.norm(y0)
        off = traj.x - (traj.x @ unit)[:, None] * unit[None, :]
        worst_line = max(worst_line, float(np.max(np.abs(off))))

    ok = worst_drift <= 1e-8 and worst_inverse <= 1e-7 and worst_line <= 1e-8
    report(
        5,
        ok,
        f"norm drift {worst_drift:.2e} (tol 1e-8), composition-inverse "
        f"{worst_inverse:.2e} (tol 1e-7), straightness {worst_line:.2e} (tol 1e-8)",
    )
    assert worst_drift <= 1e-8
    assert worst_inverse <= 1e-7
    assert worst_line <= 1e-8


def test_criterion_6_loop_shrinking_curvature():
    # (holonomy - id)/s^2 -> sigma * xi_ij with one global sigma; relative
    # error <= 1e-2 at s = 0.02 and log-log slope >= 0.8 over [0.02, 0.2]
    metric = Funk(3)
    grid = indicatrix_grid(metric, np.zeros(3), 10)
    sides = [0.2, 0.1, 0.05, 0.02]
    sigma, results = loop_curvature_scan(
        metric, np.zeros(3), [(0, 1), (0, 2), (1, 2)], sides, grid, tol=1e-11
    )
    worst_err = max(res.rel_errors[-1] for res in results.values())
    worst_slope = min(res.slope for res in results.values())
    ok = worst_err <= 1e-2 and worst_slope >= 0.8
    report(
        6,
        ok,
        f"sigma {sigma:+d} consistent over 3 pairs, rel error at s=0.02 "
        f"{worst_err:.2e} (tol 1e-2), slope {worst_slope:.2f} (min 0.8)",
    )
    assert worst_err <= 1e-2
    assert worst_slope >= 0.8


def test_criterion_7_exact_symbolic_suite():
    # zero-tolerance identities in exact rational arithmetic
    failures = []

    for n in (2, 3, 4):
        params = ModelParams(n, Fraction(1, 2), Fraction(-1, 4))

        # so(n) structure constants and commuting disjoint pairs
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if len({i, j, k}) == 3:
                        got = lie_bracket(
                            rotation_field(params, i, j), rotation_field(params, j, k)
                        )
                        if got != params.lam * rotation_field(params, i, k):
                            failures.append(f"structure constants n={n} {(i, j, k)}")
        if n >= 4 and not lie_bracket(
            rotation_field(params, 0, 1), rotation_field(params, 2, 3)
        ).is_zero:
            failures.append("disjoint rotations do not commute")

        # cyclic relation
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if len({i, j, k}) == 3:
                        rel = (
                            monomial_times_field(_unit(n, i), rotation_field(params, j, k))
                            + monomial_times_field(_unit(n, j), rotation_field(params, k, i))
                            + monomial_times_field(_unit(n, k), rotation_field(params, i, j))
                        )
                        if not rel.is_zero:
                            failures.append(f"cyclic relation n={n} {(i, j, k)}")

        # Liouville identity
        for k in range(n):
            if not liouville_identity_check(params, k)[0]:
                failures.append(f"liouville n={n} k={k}")

        # first covariant derivative: closed form vs connection composition,
        # and the distinct-index product recovery
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    closed = curvature_derivative_field(params, k, i, j)
                    if closed != curvature_derivative_from_connection(params, k, i, j):
                        failures.append(f"nabla consistency n={n} {(k, i, j)}")
                    if len({i, j, k}) == 3:
                        prod = monomial_times_field(_unit(n, k), rotation_field(params, i, j))
                        if closed != 2 * params.c * prod:
                            failures.append(f"nabla product n={n} {(k, i, j)}")

        # all four specializations of the second covariant derivative
        c2 = params.c * params.c
        for m in range(n):
            for k in range(n):
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            continue
                        general = curvature_second_derivative_field(params, m, k, i, j)
                        expected = None
                        if len({m, k, i, j}) == 4:
                            mono = _sum_units(n, m, k)
                            expected = 4 * c2 * monomial_times_field(mono, rotation_field(params, i, j))
                        elif m == k and k not in (i, j):
                            mono = tuple(2 if v == k else 0 for v in range(n))
                            expected = 2 * (c2 - params.lam) * rotation_field(params, i, j) + 4 * c2 * monomial_times_field(mono, rotation_field(params, i, j))
                        elif m == k == i:
                            mono2 = tuple(2 if v == i else 0 for v in range(n))
                            expected = (
                                -3 * params.lam * rotation_field(params, i, j)
                                + 4 * c2 * monomial_times_field(mono2, rotation_field(params, i, j))
                                + 8 * c2 * monomial_times_field(_unit(n, i), contracted_rotation(params, j))
                            )
                        elif m == i and len({i, k, j}) == 3:
                            expected = (
                                -(params.lam + c2) * rotation_field(params, k, j)
                                + 4 * c2 * monomial_times_field(_sum_units(n, i, k), rotation_field(params, i, j))
                                + 4 * c2 * monomial_times_field(_unit(n, k), contracted_rotation(params, j))
                            )
                        if expected is not None and general != expected:
                            failures.append(f"second derivative n={n} {(m, k, i, j)}")

        # bracket recursions for all multi-indices of length <= 3
        for length in (1, 2, 3):
            for mono in multi_indices(n, length):
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            continue
                        for k in range(n):
                            ok, _, _ = bracket_recursion_check(params, mono, i, j, k)
                            if not ok:
                                failures.append(f"recursion n={n} m={mono} {(i, j, k)}")

        # linear-system recovery (exact assertions inside)
        for j in range(n):
            solve_first_derivative_system(params, j)
            for k in range(n):
                if k != j:
                    solve_second_derivative_system(params, k, j)

    # determinants for n = 2..6
    for n in range(2, 7):
        if exact_determinant(first_order_system_matrix(n)) != 2 ** (n - 2) * (n + 1):
            failures.append(f"det(2I+J) n={n}")
        if exact_determinant(second_order_system_matrix(n)) != n:
            failures.append(f"det(I+J) n={n}")

    ok = not failures
    report(7, ok, f"exact symbolic suite, {len(failures)} failures" + (f": {failures[:3]}" if failures else ""))
    assert not failures


def test_criterion_8_density_certificates():
    # generated rank == monomial-module rank for (n=2, p<=6) and (n=3, p<=4)
    # for (c, lambda) in {(1/2, -1/4), (1, 1), (2, -3)}; <= 5 min each
    pairs = [
        (Fraction(1, 2), Fraction(-1, 4)),
        (Fraction(1), Fraction(1)),
        (Fraction(2), Fraction(-3)),
    ]
    worst_time = 0.0
    all_ok = True
    for n, p_max in ((2, 6), (3, 4)):
        for c, lam in pairs:
            start = time.perf_counter()
            cert = density_certificate(ModelParams(n, c, lam), p_max=p_max)
            elapsed = time.perf_counter() - start
            worst_time = max(worst_time, elapsed)
            if not cert.passed or elapsed > 300.0:
                all_ok = False
    report(
        8,
        all_ok,
        f"6 certificates (n=2 p<=6, n=3 p<=4) x 3 (c, lambda) pairs, "
        f"slowest {worst_time:.1f}s (limit 300s)",
    )
    assert all_ok


def test_criterion_9_symbolic_vs_numeric_covariant_derivative():
    # closed-form covariant derivative fields equal the numeric Berwald
    # derivative of the curvature field at 50 unit vectors, <= 1e-6
    metric = Funk(3)
    params = ModelParams(3, Fraction(1, 2), Fraction(-1, 4))
    grid = indicatrix_grid(metric, np.zeros(3), 50)
    worst = 0.0
    for k in range(3):
        for (i, j) in [(0, 1), (0, 2), (1, 2)]:
            numeric_field = berwald_covariant_derivative(
                metric, np.zeros(3), curvature_field_xy_map(metric, i, j), k
            )
            symbolic = curvature_derivative_field(params, k, i, j)
            numeric_vals = numeric_field(grid)
            for row, y in zip(numeric_vals, grid):
                worst = max(worst, float(np.max(np.abs(row - symbolic.evaluate(y)))))
    ok = worst <= 1e-6
    report(9, ok, f"max symbolic-vs-numeric deviation over 50 sphere points {worst:.2e} (tol 1e-6)")
    assert worst <= 1e-6


def _unit(n, k):
    return tuple(1 if v == k else 0 for v in range(n))


def _sum_units(n, a, b):
    return tuple((1 if v == a else 0) + (1 if v == b else 0) for v in range(n))


def test_funk_norm_sanity_anchor():
    # cheap cross-anchor: the whole suite above presumes F(0, y) = |y|
    rng = np.random.default_rng(909)
    y = rng.uniform(-1, 1, size=3) + 0.1
    assert eval_norm(Funk(3), np.zeros(3), y) == pytest.approx(np.linalg.norm(y), rel=1e-14)
    pf = projective_factor(Funk(3), np.zeros(3), y)
    assert pf.P == pytest.approx(np.linalg.norm(y) / 2, rel=1e-12)
