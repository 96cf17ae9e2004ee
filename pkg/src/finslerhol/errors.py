"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for all finslerhol errors."""


class DomainError(GeometryError):
    """A base point lies outside the metric's domain of definition."""


class DegenerateInputError(GeometryError):
    """An operation received y = 0 or a vector that left the slit tangent bundle."""


class CapabilityError(GeometryError):
    """A requested derivative order (or similar capability) is not supported."""


class NumericError(GeometryError):
    """Numerical failure, e.g. an effectively singular fundamental tensor."""


class StiffnessError(GeometryError):
    """The adaptive integrator's step size underflowed."""


class ConventionMismatchError(GeometryError):
    """Loop-shrinking estimates disagree on a single global orientation sign."""


class InternalConsistencyError(GeometryError):
    """An exact-arithmetic invariant that must hold by construction failed."""
