"""Bracket generation of the curvature-field algebra and density ranks.

Everything here is exact: fields are compared in canonical component
coordinates over Q, ranks come from incremental row reduction with rational
arithmetic, and the two linear systems that recover ``y^i xi_ij`` and
``y^k y^i xi_ij`` from covariant derivatives are inverted over Q.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InternalConsistencyError
from .spherefield import (
    ModelParams,
    SphereVectorField,
    contracted_rotation,
    curvature_derivative_field,
    curvature_second_derivative_field,
    lie_bracket,
    monomial_times_field,
    rotation_field,
)

__all__ = [
    "GradedBasis",
    "DensityCertificate",
    "generate_algebra_basis",
    "monomial_module_dimension",
    "monomial_layer_rank",
    "multi_indices",
    "density_certificate",
    "first_order_system_matrix",
    "second_order_system_matrix",
    "exact_determinant",
    "solve_first_derivative_system",
    "solve_second_derivative_system",
]


# ---------------------------------------------------------------------------
# exact linear algebra
# ---------------------------------------------------------------------------


def field_vector(field: SphereVectorField) -> dict:
    """Coefficient vector of a field: {(component, degree, monomial): Fraction}."""
    out = {}
    for s, comp in enumerate(field.components):
        for mono, coef in comp.coeffs.items():
            out[(s, sum(mono), mono)] = coef
    return out


class RationalRowReduction:
    """Incremental row echelon over Q with a deterministic pivot order."""

    def __init__(self):
        self.pivots: dict = {}  # pivot column -> normalized row (dict)

    def residual(self, vec: dict) -> dict:
        vec = dict(vec)
        while vec:
            col = min(vec)
            row = self.pivots.get(col)
            if row is None:
                return vec
            factor = vec[col]
            for c, v in row.items():
                s = vec.get(c, Fraction(0)) - factor * v
                if s:
                    vec[c] = s
                else:
                    vec.pop(c, None)
        return vec

    def insert(self, vec: dict) -> bool:
        """Add the vector if independent; returns True when the rank grew."""
        res = self.residual(vec)
        if not res:
            return False
        col = min(res)
        inv = 1 / res[col]
        self.pivots[col] = {c: v * inv for c, v in res.items()}
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def exact_determinant(matrix) -> Fraction:
    """Determinant of a square rational matrix by fraction elimination."""
    m = [[Fraction(v) for v in row] for row in matrix]
    size = len(m)
    det = Fraction(1)
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if m[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, size):
            factor = m[r][col] * inv
            if factor == 0:
                continue
            for c in range(col, size):
                m[r][c] -= factor * m[col][c]
    return det


def _invert_rational(matrix) -> list:
    size = len(matrix)
    aug = [
        [Fraction(v) for v in row] + [Fraction(1 if r == c else 0) for c in range(size)]
        for r, row in enumerate(matrix)
    ]
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if aug[r][col] != 0), None)
        if pivot_row is None:
            raise InternalConsistencyError("singular system matrix")
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(size):
            if r == col or aug[r][col] == 0:
                continue
            factor = aug[r][col]
            aug[r] = [v - factor * p for v, p in zip(aug[r], aug[col])]
    return [row[size:] for row in aug]


# ---------------------------------------------------------------------------
# graded basis generation
# ---------------------------------------------------------------------------


@dataclass
class GradedBasis:
    """Linearly independent generated fields with provenance records."""

    n: int
    fields: list
    provenance: list
    truncated: bool
    bracket_depth: int

    def rank_by_degree(self, p: int) -> int:
        """Rank of the stored fields whose component degree is <= p + 1."""
        reducer = RationalRowReduction()
        for f in self.fields:
            if f.degree <= p:
                reducer.insert(field_vector(f))
        return reducer.rank

    @property
    def rank(self) -> int:
        return len(self.fields)


def _seed_fields(params: ModelParams):
    n = params.n
    seeds = []
    for i in range(n):
        for j in range(i + 1, n):
            seeds.append((f"xi_{i + 1}{j + 1}", rotation_field(params, i, j)))
    for k in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                seeds.append(
                    (
                        f"nabla_{k + 1} xi_{i + 1}{j + 1}",
                        curvature_derivative_field(params, k, i, j),
                    )
                )
    for m in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(i + 1, n):
                    seeds.append(
                        (
                            f"nabla_{m + 1} nabla_{k + 1} xi_{i + 1}{j + 1}",
                            curvature_second_derivative_field(params, m, k, i, j),
                        )
                    )
    return seeds


def generate_algebra_basis(
    params: ModelParams,
    degree_cap: int,
    bracket_depth_cap: int | None = None,
) -> GradedBasis:
    """Bracket-generate the algebra spanned by the curvature fields and their
    first and second covariant derivatives, truncated at ``degree_cap``.

    Breadth-first by bracket depth with a deterministic pair order; candidates
    whose component degree would exceed ``degree_cap + 1`` are discarded
    before bracketing.  Stops at a fixpoint or at ``bracket_depth_cap``.
    """
    if degree_cap < 0:
        raise ValueError("degree_cap must be nonnegative")
    if bracket_depth_cap is None:
        bracket_depth_cap = degree_cap + 2
    reducer = RationalRowReduction()
    fields: list[SphereVectorField] = []
    provenance: list[str] = []

    def try_add(field, label) -> bool:
        if field.is_zero or field.degree > degree_cap:
            return False
        if reducer.insert(field_vector(field)):
            fields.append(field)
            provenance.append(label)
            return True
        return False

    for label, f in _seed_fields(params):
        try_add(f, "seed " + label)

    depth = 0
    frontier = list(range(len(fields)))
    truncated = False
    while frontier:
        if depth >= bracket_depth_cap:
            truncated = True
            break
        depth += 1
        new_frontier = []
        pairs = []
        for b in frontier:
            for a in range(len(fields)):
                if a == b:
                    continue
                pairs.append((min(a, b), max(a, b)))
        seen = set()
        for a, b in sorted(pairs):
            if (a, b) in seen:
                continue
            seen.add((a, b))
            if fields[a].degree + fields[b].degree > degree_cap:
                continue
            candidate = lie_bracket(fields[a], fields[b])
            if try_add(candidate, f"bracket depth {depth}: [{a}, {b}]"):
                new_frontier.append(len(fields) - 1)
        frontier = new_frontier
    return GradedBasis(
        n=params.n,
        fields=fields,
        provenance=provenance,
        truncated=truncated,
        bracket_depth=depth,
    )


# ---------------------------------------------------------------------------
# the monomial module and density ranks
# ---------------------------------------------------------------------------


def multi_indices(n: int, length: int):
    if n == 1:
        yield (length,)
        return
    for head in range(length + 1):
        for rest in multi_indices(n - 1, length - head):
            yield (head,) + rest


def _monomial_fields(n: int, p: int, exact_layer: bool):
    params = ModelParams(n, Fraction(1), Fraction(1))
    lengths = [p] if exact_layer else range(p + 1)
    for length in lengths:
        for mono in sorted(multi_indices(n, length)):
            for i in range(n):
                for j in range(i + 1, n):
                    yield monomial_times_field(mono, rotation_field(params, i, j))


def monomial_module_dimension(n: int, p: int) -> int:
    """Exact rank of span{y^m xi_ij : l(m) <= p} in component coordinates.

    This is the dimension the degree-p slice of the polynomial vector-field
    module occupies; the rank is independent of the curvature scale.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    reducer = RationalRowReduction()
    for f in _monomial_fields(n, p, exact_layer=False):
        reducer.insert(field_vector(f))
    return reducer.rank


def monomial_layer_rank(n: int, p: int) -> int:
    """Rank of the single layer {y^m xi_ij : l(m) = p}."""
    reducer = RationalRowReduction()
    for f in _monomial_fields(n, p, exact_layer=True):
        reducer.insert(field_vector(f))
    return reducer.rank


# ---------------------------------------------------------------------------
# density certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DensityRow:
    p: int
    generated_rank: int
    target_rank: int
    passed: bool


@dataclass
class DensityCertificate:
    params: ModelParams
    p_max: int
    rows: tuple
    degenerate: bool
    truncated: bool
    witness: str | None

    @property
    def passed(self) -> bool:
        return not self.degenerate and all(r.passed for r in self.rows)

    def table(self) -> str:
        lines = ["  p  generated  target  status"]
        for r in self.rows:
            status = "pass" if r.passed else "FAIL"
            lines.append(f"{r.p:3d}  {r.generated_rank:9d}  {r.target_rank:6d}  {status}")
        return "\n".join(lines)


def _find_missing_direction(basis: GradedBasis, n: int, p: int) -> str | None:
    reducer = RationalRowReduction()
    for f in basis.fields:
        if f.degree <= p:
            reducer.insert(field_vector(f))
    for mono in sorted(multi_indices(n, p)):
        params = ModelParams(n, Fraction(1), Fraction(1))
        for i in range(n):
            for j in range(i + 1, n):
                f = monomial_times_field(mono, rotation_field(params, i, j))
                if not f.is_zero and reducer.residual(field_vector(f)):
                    return f"y^{mono} xi_{i + 1}{j + 1} not generated at degree {p}"
    return None


def density_certificate(
    params: ModelParams,
    p_max: int,
    degree_cap: int | None = None,
    bracket_depth_cap: int | None = None,
) -> DensityCertificate:
    """Per-degree rank comparison: generated algebra vs full monomial module.

    Passing every degree p <= p_max certifies that the generated algebra
    contains the whole polynomial vector-field module up to that degree.
    lam = 0 (or c = 0) gives no curvature fields / no derivative recovery and
    is reported as degenerate rather than raising.
    """
    if degree_cap is None:
        degree_cap = p_max
    if degree_cap < p_max:
        raise ValueError("degree_cap must cover p_max")
    degenerate = params.lam == 0 or params.c == 0
    basis = generate_algebra_basis(params, degree_cap, bracket_depth_cap)
    rows = []
    witness = None
    for p in range(p_max + 1):
        generated = basis.rank_by_degree(p)
        target = monomial_module_dimension(params.n, p)
        ok = generated == target
        rows.append(DensityRow(p=p, generated_rank=generated, target_rank=target, passed=ok))
        if not ok and witness is None and generated < target:
            witness = _find_missing_direction(basis, params.n, p)
        if not ok and witness is None and generated > target:
            witness = f"generated rank exceeds monomial module at degree {p}"
    return DensityCertificate(
        params=params,
        p_max=p_max,
        rows=tuple(rows),
        degenerate=degenerate,
        truncated=basis.truncated,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# the two linear systems
# ---------------------------------------------------------------------------


def first_order_system_matrix(n: int) -> list:
    """(n-1) x (n-1) matrix 2I + J (diagonal 3, off-diagonal 1)."""
    size = n - 1
    return [
        [Fraction(3) if r == c else Fraction(1) for c in range(size)]
        for r in range(size)
    ]


def second_order_system_matrix(n: int) -> list:
    """(n-1) x (n-1) matrix I + J (diagonal 2, off-diagonal 1)."""
    size = n - 1
    return [
        [Fraction(2) if r == c else Fraction(1) for c in range(size)]
        for r in range(size)
    ]


def _unit(n: int, k: int) -> tuple:
    return tuple(1 if v == k else 0 for v in range(n))


def solve_first_derivative_system(params: ModelParams, j: int) -> list:
    """Recover the fields y^i xi_ij (i != j) from first covariant derivatives.

    nabla_i xi_ij = c (2 y^i xi_ij + sum_s y^s xi_sj) stacks to the linear
    system (2I + J) u = b over the index set {1..n} minus {j}; the matrix is
    inverted exactly and the recovered fields are asserted against direct
    construction.
    """
    if params.c == 0:
        raise ValueError("needs c != 0")
    n = params.n
    idx = [i for i in range(n) if i != j]
    inv_c = 1 / params.c
    b = [inv_c * curvature_derivative_field(params, i, i, j) for i in idx]
    minv = _invert_rational(first_order_system_matrix(n))
    recovered = []
    for r, i in enumerate(idx):
        acc = SphereVectorField.zero(n)
        for cidx in range(len(idx)):
            acc = acc + minv[r][cidx] * b[cidx]
        expected = monomial_times_field(_unit(n, i), rotation_field(params, i, j))
        if acc != expected:
            raise InternalConsistencyError(
                f"first-order system recovery failed for i={i}, j={j}"
            )
        recovered.append(acc)
    return recovered


def solve_second_derivative_system(params: ModelParams, k: int, j: int) -> list:
    """Recover the fields y^k y^i xi_ij (i != j) from second derivatives.

    Rows i != k come from nabla_i nabla_k xi_ij + (c^2 + lam) xi_kj scaled by
    1/(4c^2); the diagonal row i = k is assembled from the i = k = m
    specialization together with the closed-form contraction sum_s y^s xi_sj,
    which keeps the system matrix exactly I + J.
    """
    if params.c == 0:
        raise ValueError("needs c != 0")
    if k == j:
        raise ValueError("needs k != j")
    n = params.n
    idx = [i for i in range(n) if i != j]
    c2 = params.c * params.c
    scale = Fraction(1, 4) / c2
    xi_kj = rotation_field(params, k, j)
    b = []
    for i in idx:
        if i != k:
            lhs = curvature_second_derivative_field(params, i, k, i, j) + (
                c2 + params.lam
            ) * xi_kj
            b.append(scale * lhs)
        else:
            lhs = curvature_second_derivative_field(params, k, k, k, j) + (
                3 * params.lam
            ) * xi_kj
            S = monomial_times_field(_unit(n, k), contracted_rotation(params, j))
            b.append(scale * lhs - S)
    minv = _invert_rational(second_order_system_matrix(n))
    recovered = []
    for r, i in enumerate(idx):
        acc = SphereVectorField.zero(n)
        for cidx in range(len(idx)):
            acc = acc + minv[r][cidx] * b[cidx]
        mono = tuple(
            (1 if v == k else 0) + (1 if v == i else 0) for v in range(n)
        )
        expected = monomial_times_field(mono, rotation_field(params, i, j))
        if acc != expected:
            raise InternalConsistencyError(
                f"second-order system recovery failed for i={i}, k={k}, j={j}"
            )
        recovered.append(acc)
    return recovered
