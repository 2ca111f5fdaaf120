"""Exception types raised by the solvers and the bench harness."""


class InputError(ValueError):
    """Invalid argument: bad shape, out-of-range parameter, non-finite data."""


class NumericError(ArithmeticError):
    """A numerical procedure failed."""


class DivergenceError(NumericError):
    """An ADMM iterate became non-finite."""

    def __init__(self, iteration, message=None):
        self.iteration = iteration
        super().__init__(message or f"non-finite iterate at ADMM iteration {iteration}")


class DegenerateSupportError(NumericError):
    """The zero support is empty, so the noise variance is undefined."""


class InvariantError(AssertionError):
    """A structural invariant of the outer loop was violated."""
