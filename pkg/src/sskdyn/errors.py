"""Exception hierarchy shared by every module.

The CLI maps each family to a distinct exit status, so callers catching
``SskdynError`` get everything and narrower classes get one family.
"""


class SskdynError(Exception):
    exit_code = 1


class ConfigError(SskdynError):
    """Bad configuration: unknown law, malformed JSON, out-of-range fields.

    ``violations`` holds ``(field_path, message)`` pairs when more than one
    problem was found at once.
    """

    exit_code = 2

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class DomainError(SskdynError, ValueError):
    exit_code = 3


class DegenerateInputError(DomainError):
    """Input lies on a probability-zero set (zero overlap, repeated eigenvalue)."""


class HorizonError(DomainError):
    """The requested horizon cannot be represented; shorten T."""


class NumericalError(SskdynError, ArithmeticError):
    exit_code = 4

    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst


class BlowUpError(NumericalError):
    pass


class NotHitError(SskdynError):
    """Iteration cap reached before the overlap threshold was crossed."""

    exit_code = 5

    def __init__(self, message, last_overlap=None, iterations=None):
        super().__init__(message)
        self.last_overlap = last_overlap
        self.iterations = iterations
