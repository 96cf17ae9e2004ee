"""Sprays, curvature, nonlinear parallel transport and holonomy-algebra
generation for projectively flat Finsler metrics of constant curvature."""

from .curvature import (
    CurvatureValue,
    covariant_curvature_residual,
    curvature_field_xy_map,
    curvature_vector_field,
    flag_curvature_residual,
    lambda_fit,
    riemann_curvature,
    second_covariant_curvature,
)
from .errors import (
    CapabilityError,
    ConventionMismatchError,
    DegenerateInputError,
    DomainError,
    GeometryError,
    InternalConsistencyError,
    NumericError,
    StiffnessError,
)
from .holonomy import (
    DensityCertificate,
    GradedBasis,
    density_certificate,
    generate_algebra_basis,
    monomial_layer_rank,
    monomial_module_dimension,
    solve_first_derivative_system,
    solve_second_derivative_system,
)
from .metrics import (
    BryantShen,
    Euclidean,
    FinslerMetric,
    Funk,
    Scaled,
    directional_derivatives,
    eval_norm,
    eval_norm_squared,
    fundamental_tensor,
)
from .spherefield import (
    ModelParams,
    SphereVectorField,
    bracket_recursion_check,
    curvature_derivative_field,
    curvature_second_derivative_field,
    lie_bracket,
    liouville_identity_check,
    monomial_times_field,
    rotation_field,
)
from .spherepoly import SpherePolynomial
from .spray import (
    ProjectiveFactorValue,
    SprayData,
    berwald_covariant_derivative,
    connection_x_derivatives,
    projective_factor,
    projective_flatness_residual,
    spray_data,
)
from .transport import (
    CoordinateRectangle,
    GeodesicTrajectory,
    IndicatrixMapSample,
    LoopCurvatureResult,
    ParametricCurve,
    Polyline,
    TransportResult,
    curvature_from_loops,
    holonomy_loop_map,
    indicatrix_grid,
    integrate_geodesic,
    loop_curvature_scan,
    parallel_transport,
)

__version__ = "0.1.0"
