class SbpInductionException(Exception):
    """
    Base except which all sbp_induction errors extend
    """

    pass


class OperatorError(SbpInductionException):
    """
    An error building or applying a summation-by-parts operator, e.g. an
    unsupported order or too few nodes for the boundary closures
    """

    pass


class GridError(SbpInductionException):
    """
    An error describing the geometry of a grid
    """

    pass


class FieldShapeError(SbpInductionException):
    """
    Error raised when a grid function does not match the grid or operator it
    is used with
    """

    pass


class NonFiniteFieldError(SbpInductionException):
    """
    Error raised when a grid function contains NaN or infinite values
    """

    pass


class InvalidFormError(SbpInductionException):
    """
    Error raised when a form selector is not one of the known discretisations
    """

    pass


class BoundaryDataError(SbpInductionException):
    """
    Error raised when a boundary condition lacks the data it needs
    """

    pass


class NonPositiveDensityError(SbpInductionException):
    """
    Error raised when the charge density is not strictly positive
    """

    pass


class CleaningError(SbpInductionException):
    """
    An error during divergence cleaning
    """

    pass


class ConfigurationError(SbpInductionException):
    """
    Error raised when run options are invalid or inconsistent
    """

    pass


class OutputError(SbpInductionException):
    """
    Error raised when a result file cannot be written
    """

    pass


class SolverBlowUpError(SbpInductionException):
    """
    Error raised when the numerical solution stops being finite. The time and
    the index of the offending step can be accessed via ``e.t`` and ``e.step``
    """

    def __init__(self, message: str, t: float, step: int) -> None:
        super().__init__(message)
        self.t = t
        self.step = step
