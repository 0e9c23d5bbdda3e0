"""Exception types raised by the curvature engine and its front ends."""


class CurvlabError(Exception):
    """Base class for all engine errors."""


class PointOutOfDomain(CurvlabError):
    """Requested point lies outside the chart's margin-shrunk domain."""


class SingularMetric(CurvlabError):
    """Metric is not symmetric positive definite at the requested point."""


class StencilOutOfDomain(CurvlabError):
    """A finite-difference stencil would leave the chart domain."""


class DegeneratePlane(CurvlabError):
    """Sectional-curvature plane is (numerically) degenerate."""


class DimensionUnsupported(CurvlabError):
    """Identity is undefined in this dimension (e.g. Cotton-Weyl relation at n=3)."""


class UnsupportedDimension(CurvlabError):
    """Chart family is not provided for this dimension."""


class HypothesisViolated(CurvlabError):
    """A gated residual was requested at a point violating its hypothesis."""


class NonConstantScalarCurvature(CurvlabError):
    """Constant-scalar-curvature hypothesis fails on the sampling grid."""


class DegenerateEigenbasis(CurvlabError):
    """Eigenvectors could not be orthonormalized against the metric."""


class NotWarpedProduct(CurvlabError):
    """Operation requires a warped-product chart over a round sphere."""


class InadmissibleMass(CurvlabError):
    """Mass parameter is outside the open interval that yields two positive roots."""


class NonpositiveWarp(CurvlabError):
    """Warp factor must be strictly positive."""
