"""Exception types raised across the package."""


class SubmaxError(Exception):
    pass


class InvalidSubset(SubmaxError, ValueError):
    """A subset names an element outside the ground set."""


class CapExceeded(SubmaxError):
    """An exhaustive computation was asked to run above its size cap."""


class InvalidParameter(SubmaxError, ValueError):
    pass


class ContractViolation(SubmaxError):
    """A stream or policy broke the contract it was constructed under."""


class GenerationFailed(SubmaxError):
    """Rejection sampling ran out of attempts."""


class InvalidConfig(SubmaxError, ValueError):
    pass
