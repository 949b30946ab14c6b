"""Exception hierarchy shared by the library and the CLI exit codes."""


class PolyharmError(Exception):
    """Base class for all errors raised by polyharm."""


class DomainError(PolyharmError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class PoleError(DomainError):
    """Evaluation at a pole of a rational function."""


class PreconditionError(PolyharmError, ValueError):
    """An operation was called outside its documented preconditions."""


class UnsupportedError(PolyharmError):
    """The requested configuration (degree, multiplicities, order) is not handled."""


class DiscretizationError(PolyharmError, ArithmeticError):
    """A finite-difference computation became numerically meaningless."""


class VerificationError(PolyharmError, ArithmeticError):
    """A computed solution failed its independent re-verification."""
