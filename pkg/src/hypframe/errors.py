"""Exception hierarchy shared by every module of the package."""


class HyperError(ValueError):
    """Base class for all domain errors raised by hypframe."""


class DimensionMismatch(HyperError):
    pass


class NotHomogeneous(HyperError):
    def __init__(self, offending):
        self.offending = list(offending)
        super().__init__(f"polynomial is not homogeneous; offending terms: {self.offending}")


class InvalidDirection(HyperError):
    """p(e) vanishes (numerically), so e cannot serve as a hyperbolicity direction."""


class HyperbolicityViolation(HyperError):
    """t -> p(te - x) has non-real roots beyond the violation threshold."""

    def __init__(self, witness, max_imag):
        self.witness = witness
        self.max_imag = float(max_imag)
        super().__init__(
            f"non-real roots (max |imag| = {self.max_imag:.3e}) at x = {list(map(float, witness))}"
        )


class PreconditionError(HyperError):
    """An operation was called on inputs that fail its stated preconditions."""


class InputError(HyperError):
    """Malformed external input (files, command-line values)."""
