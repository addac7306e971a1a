"""Exception hierarchy shared by all spinmech modules."""


class SpinmechError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(SpinmechError, ValueError):
    """An argument violates a documented precondition."""


class NumericalOverflowError(SpinmechError, ArithmeticError):
    """A state variable became non-finite or crossed the overflow bound."""


class ConfigurationError(SpinmechError, ValueError):
    """A run configuration is inconsistent or violates a stability bound.

    ``errors`` holds one message per problem so callers can report them all
    at once instead of failing on the first.
    """

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class FitWindowError(InvalidInputError):
    """A regression window contains zeros or sign changes."""
