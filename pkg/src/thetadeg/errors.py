"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Vector length does not match the rank of the quadratic form."""


class WindowExhaustionError(RuntimeError):
    """The lattice window could not certify the hull faces.

    This signals a bug in the window-sizing logic, not a user error.
    """


class TruncationBandError(ValueError):
    """Argument lies outside the certified imaginary band.

    Rebuild the context with a larger ``im_w_bound`` to evaluate here.
    """


class PositivityCertificationError(RuntimeError):
    """A matrix that must be positive definite failed the check.

    Raised by the Fubini-Study machinery when the pulled-back form is not
    positive at a quadrature node (truncation too coarse, or the embedding
    is degenerate for these parameters).
    """
