"""Exception types raised across the library.

Everything derives from ``VarietalError`` so callers can catch library
failures with a single except clause.  Plain ``OverflowError`` is reused for
combinatorial blow-ups (it is the natural builtin).
"""


class VarietalError(Exception):
    """Base class for all library-specific errors."""


class DimensionMismatch(VarietalError):
    """An input vector or matrix has an incompatible shape."""


class EmptyInput(VarietalError):
    """An operation that needs at least one element received none."""


class DegreeError(VarietalError):
    """A polynomial degree is outside the range an operation supports."""


class NonFiniteInput(VarietalError):
    """An input contains NaN or infinity."""


class NotOrthonormalInput(VarietalError):
    """A matrix expected to have orthonormal columns does not."""


class RankDeficient(VarietalError):
    """A matrix required to have full column rank does not."""


class ProductCountOverflow(VarietalError):
    """A combinatorial family of generators exceeds the configured cap."""


class DegenerateGradients(VarietalError):
    """All supplied gradient vectors are numerically zero."""


class DegenerateData(VarietalError):
    """A data set is unusable (for example, every point is zero)."""


class ZeroGradients(VarietalError):
    """Every basis gradient vanishes at the query point.

    This typically signals a point at (or numerically near) an intersection
    of the underlying subspaces, where no single subspace is identifiable.
    """


class TooFewPoints(VarietalError):
    """The sample is too small to pin down the vanishing polynomials."""


class GroupingFailure(VarietalError):
    """Grouping produced a number of clusters different from the requested one."""


class NoVanishingDegree(VarietalError):
    """No tested degree admits a well-determined vanishing polynomial."""


class PointsOffModel(VarietalError):
    """Points violate the precondition of lying on the given model."""

    def __init__(self, message, rows=None):
        super().__init__(message)
        self.rows = list(rows) if rows is not None else []
