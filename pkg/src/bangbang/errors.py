"""Exception types raised by the synthesis toolkit."""


class BangBangError(Exception):
    """Base class for all package errors."""


class DomainError(BangBangError, ValueError):
    """A closed form was evaluated outside its validity range."""


class NoRootError(BangBangError):
    """The symmetric-sequence condition has no root on the scan grid."""

    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = tuple(roots)


class InfeasibleError(BangBangError):
    """The brute-force search found no schedule meeting the terminal bound."""


class CostateError(BangBangError):
    """The costate multiplier cannot be fixed by the zero-Hamiltonian condition."""
