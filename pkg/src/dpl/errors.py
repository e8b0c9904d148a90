"""Exception types raised across the package."""


class DplError(Exception):
    """Base class for all package errors."""


class PreconditionError(DplError, ValueError):
    """An input violates the documented precondition of a check."""


class FormulaSyntaxError(DplError, ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.reason = message
        self.position = position


class ModelError(DplError, ValueError):
    pass


class UnknownOperatorError(DplError, KeyError):
    def __str__(self):
        return f"unknown operator {self.args[0]!r}"


class OperatorNotClosedError(DplError):
    """An operator produced something that is not a preorder on the same worlds."""


class InstanceSpaceTooLarge(DplError):
    pass


class ConfigError(DplError, ValueError):
    pass
