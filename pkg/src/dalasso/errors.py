"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Raised when an argument violates a documented precondition."""


class NumericError(ArithmeticError):
    """Raised when a numerical routine cannot complete.

    ``min_pivot`` carries the smallest diagonal pivot seen during a failed
    Cholesky factorization (``nan`` when not applicable).
    """

    def __init__(self, message, min_pivot=float("nan")):
        super().__init__(message)
        self.min_pivot = min_pivot


class GridBoundsError(ParameterError):
    """Raised when a quadrature grid does not cover the posterior mass."""
