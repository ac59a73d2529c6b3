"""Shared exception types."""


class WeldmonError(Exception):
    """Base class for all weldmon errors."""


class InvalidArgumentError(WeldmonError, ValueError):
    """An argument violates an operation's precondition."""


class EmptyInputError(WeldmonError, ValueError):
    """An operation received an empty input where data is required."""
