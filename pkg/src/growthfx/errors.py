class ConvergenceError(RuntimeError):
    """A quadrature or series did not reach its tolerance.

    ``estimate`` carries the achieved error estimate when one exists.
    """

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class PrecisionWarning(UserWarning):
    """Evaluation outside the range where the stated accuracy is guaranteed."""
