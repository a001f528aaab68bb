"""Exception hierarchy shared by all fwkit modules."""


class FwkitError(Exception):
    """Base class for all errors raised by fwkit."""


class InputError(FwkitError):
    """Malformed or out-of-domain input (wrong dimension, non-finite data)."""


class ContractViolation(FwkitError):
    """A documented precondition was violated by the caller."""


class CapabilityError(FwkitError):
    """The requested operation is not supported for this variant/region."""


class NumericalError(FwkitError):
    """An iterative routine failed to converge or hit its safety cap."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
