"""Exception types raised across brierlab."""


class BrierLabError(Exception):
    """Base class for all brierlab errors."""


class DomainError(BrierLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class ModelValidationError(DomainError):
    """Invalid model parameters (prior outside (0, 1), covariance not PD, ...)."""


class PreconditionError(BrierLabError, ValueError):
    """A mathematical precondition of the operation does not hold for the input."""


class NoCrossing(BrierLabError):
    """Two loss curves never change order.

    Attributes
    ----------
    equal : bool
        True when the curves coincide within tolerance everywhere.
    dominant : int or None
        1 or 2, the index of the pointwise lower curve; None when ``equal``.
    """

    def __init__(self, equal, dominant=None):
        self.equal = equal
        self.dominant = dominant
        if equal:
            msg = "curves are equal; no crossing"
        else:
            msg = f"curve {dominant} lies below the other everywhere; no crossing"
        super().__init__(msg)
