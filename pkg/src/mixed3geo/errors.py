"""Exception hierarchy shared by every module of the package."""


class GeometryError(Exception):
    """Base class for all errors raised by mixed3geo."""


class DegenerateValue(GeometryError):
    """A jet operation hit a zero divisor or a nonpositive radicand."""


class SamplingExhausted(GeometryError):
    """Rejection sampling could not find enough points inside the chart domain."""


class StencilOutOfDomain(GeometryError):
    """A finite-difference stencil point fell outside the chart domain."""


class NotSkewAdjoint(GeometryError):
    """An endomorphism is not skew-adjoint with respect to the metric."""


class NullPivot(GeometryError):
    """Indefinite Gram-Schmidt ran out of non-null candidates."""


class DegenerateMetric(GeometryError):
    """The metric is (numerically) singular at the requested point."""


class DegeneratePlane(GeometryError):
    """A 2-plane is degenerate for the metric, so its sectional curvature is undefined."""


class DegenerateVertical(GeometryError):
    """The Gram matrix of the Reeb vector fields is singular."""


class DimensionError(GeometryError):
    """The manifold dimension is incompatible with the requested structure."""


class BadSeedPoint(GeometryError):
    """A hypersurface seed point is too close to the equator of its graph chart."""


class ConfigError(GeometryError):
    """Unknown suite or model, or a suite applied to a model it does not support."""
