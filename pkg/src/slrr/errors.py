"""Exception types raised across the package."""


class SlrrError(Exception):
    """Base class for all package errors."""


class AntipodalError(SlrrError, ValueError):
    """Raised when the logarithm map is requested at the cut locus."""


class BaseMismatchError(SlrrError, ValueError):
    """Raised when two tangent vectors live in different tangent spaces."""


class DimensionError(SlrrError, ValueError):
    """Raised on inconsistent array shapes."""


class SvdFailure(SlrrError, ArithmeticError):
    """Raised when the SVD backend fails to converge."""


class EmptyRangeError(SlrrError, ValueError):
    """Raised when a histogram range has zero width but more than one bin."""


class DegenerateAffinityError(SlrrError, ValueError):
    """Raised when spectral clustering is asked to split an empty graph."""


class LengthMismatchError(SlrrError, ValueError):
    pass


class EmptyTrainError(SlrrError, ValueError):
    pass


class SeparationUnsatisfiable(SlrrError, RuntimeError):
    """Raised when synthetic centroids cannot meet the separation target."""
