"""Exception taxonomy shared by all modules.

Each class maps to a distinct CLI exit code, so library errors stay
distinguishable at the process boundary.
"""


class KnsError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(KnsError):
    """A caller-supplied parameter is out of its documented domain."""


class InvalidDataError(KnsError):
    """Input data violates the numeric-matrix contract (shape, finiteness, parse)."""


class InternalContractError(KnsError):
    """An internal precondition was violated; indicates a bug, not user error."""
