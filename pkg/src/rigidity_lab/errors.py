"""Shared exception types."""


class RigidityLabError(Exception):
    """Base class for all library errors."""


class ConductorCapExceeded(RigidityLabError):
    """A cyclotomic operation would need a conductor above the configured cap."""


class NonUnitError(RigidityLabError):
    """Inversion was requested for an element that is not a unit."""


class WindowError(RigidityLabError):
    """A series operation was asked for coefficients outside its reliable window."""


class InputError(RigidityLabError):
    """Malformed user input (lattice or model file, CLI argument)."""


class CheckFailure(RigidityLabError):
    """An exact or numeric identity check did not hold."""


class PoleCancellationError(RigidityLabError):
    """A q-coefficient of a genus did not reduce to a Laurent polynomial.

    Carries the offending exponent and the residual denominator factor.
    """

    def __init__(self, exponent, residual):
        self.exponent = exponent
        self.residual = residual
        super().__init__(
            f"coefficient at q^{exponent} does not reduce; residual denominator {residual}"
        )
