"""Exception hierarchy shared by all modules."""


class QubitDynError(Exception):
    """Base class for every error raised by qubit_dyn."""


class InvalidState(QubitDynError, ValueError):
    """A matrix or parameterization violates the density-matrix invariants."""


class ModelMismatch(QubitDynError, ValueError):
    """An operation was called with parameters for the other environment model."""


class StepTooLarge(QubitDynError, ValueError):
    """The integrator step exceeds the stability bound for the given coupling."""


class ConfigError(QubitDynError, ValueError):
    """A run configuration is malformed or out of range."""


class NumericalError(QubitDynError, ArithmeticError):
    """Base class for failures detected while computing."""


class PositivityViolation(NumericalError):
    """A propagated state acquired an eigenvalue below -tol_psd."""


class NumericalBreakdown(NumericalError):
    """A spectral quantity fell outside the range its definition allows."""


class GridTooCoarse(NumericalError):
    """More than one sign change was found inside a single scan cell."""
