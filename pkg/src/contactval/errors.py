"""Exception types shared by all modules."""


class ContactValError(Exception):
    """Base class for library errors."""


class DimensionError(ContactValError, ValueError):
    """Matrix or block sizes do not fit together."""


class ValidationError(ContactValError, ValueError):
    """Input fails a structural check (symmetry, antisymmetry, PSD)."""


class DomainError(ContactValError, ValueError):
    """Argument outside the supported domain."""


class PoleError(ContactValError, ValueError):
    """Gamma-function argument sits on a pole."""


class DegeneracyError(ContactValError, ArithmeticError):
    """Singular linearization at a contact point (not normally transversal).

    Attributes
    ----------
    point : ndarray or None
        Location of the degenerate tangency, when known.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class TransversalityError(ContactValError, ArithmeticError):
    """Flat and plane are too close to non-transversal."""


class ConsistencyError(ContactValError, AssertionError):
    """Two independent computation paths disagree."""


class ContractError(ContactValError, ValueError):
    """Caller violated a documented precondition."""
