"""Exception hierarchy shared by the library and the CLI."""

__all__ = [
    "AndOrError",
    "InputError",
    "ContractError",
    "CapabilityError",
    "DomainError",
    "CertificationError",
]


class AndOrError(Exception):
    """Base class for every error raised by andor_equilibrium."""


class InputError(AndOrError, ValueError):
    """A value does not match its shape or leaves [0, 1]."""


class ContractError(AndOrError):
    """A strategy breaks alpha-beta semantics."""


class CapabilityError(AndOrError):
    """A request exceeds a desk-scale enumeration or optimization bound."""


class DomainError(AndOrError, ValueError):
    """A parameter lies outside the domain where a result is stated."""


class CertificationError(AndOrError):
    """An exact certificate failed.

    ``interval`` holds the (lo, hi) bracket where the failure was located,
    when one is known.
    """

    def __init__(self, message: str, interval: tuple | None = None):
        super().__init__(message)
        self.interval = interval
