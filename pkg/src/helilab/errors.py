"""Exception types shared across the package."""


class HelilabError(Exception):
    """Base class for all package errors."""


class DegenerateGridError(HelilabError):
    """Grid construction produced no masked-in cells."""


class GridMismatchError(HelilabError):
    """Two sampled fields do not live on the same grid."""


class OpenCurveError(HelilabError):
    """A closed curve was required."""


class IntersectingCurvesError(HelilabError):
    """Curves touch or intersect where disjointness is required."""


class OverlapError(HelilabError):
    """Domains overlap where disjointness is required."""


class NotCurlFreeError(HelilabError):
    """A field failed the curl-free gate."""


class SingularFlowError(HelilabError):
    """A flow map produced a non-positive Jacobian determinant."""


class ConfigError(HelilabError):
    """Invalid CLI configuration."""


class SolenoidalWarning(UserWarning):
    """A Biot-Savart source has visible stencil divergence."""


class CurlMismatchWarning(UserWarning):
    """A supplied vorticity disagrees with the stencil curl of its field."""
