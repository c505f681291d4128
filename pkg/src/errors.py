"""Exception hierarchy shared by every package.

Each class carries the process exit code the CLI reports for it:
2 for bad input files, 3 for violated preconditions, 4 for numerical
non-convergence.
"""


class QCError(Exception):
    exit_code = 1


class InputError(QCError):
    """Malformed or unreadable input file."""
    exit_code = 2


class DomainError(QCError):
    """A precondition of the requested computation does not hold."""
    exit_code = 3


class SeriesDomainError(DomainError):
    pass


class ClassMismatchError(DomainError):
    """Series is not in the normalized class the operation needs (S or Sigma)."""
    pass


class IntegrabilityError(DomainError):
    pass


class DegenerateError(DomainError):
    pass


class InsufficientTruncationError(DomainError):
    pass


class NumericalError(QCError):
    exit_code = 4


class QuadratureError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class GridResolutionError(NumericalError):
    pass


class KKTError(NumericalError):
    pass
