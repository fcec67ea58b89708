from anticor.constants import (
    CODE_ARGUMENT, CODE_DATA, CODE_INPUT, CODE_NUMERIC, CODE_UNKNOWN,
    ERROR_CODES,
)


class AnticorError(Exception):
    """Base of every error raised by the library.

    `context` keeps the structured details (row, column, window, ...) so
    callers can report them without parsing the message.
    """
    code = CODE_UNKNOWN

    def __init__(self, message, **context):
        super().__init__(message)
        self.message = message
        self.context = context

    @property
    def reason(self):
        try:
            return ERROR_CODES[self.code]
        except KeyError:
            return 'UNKNOWN'

    def __repr__(self):
        details = "".join(f", {key}={value!r}" for key, value in self.context.items())
        return f"{type(self).__name__}({self.message!r}, reason={self.reason}{details})"


class ArgumentError(AnticorError, ValueError):
    code = CODE_ARGUMENT


class InputError(AnticorError, OSError):
    code = CODE_INPUT


class FormatError(ArgumentError):
    pass


class DataError(AnticorError, ValueError):
    code = CODE_DATA


class ParseError(DataError):
    def __init__(self, message, row=None, **context):
        super().__init__(message, row=row, **context)
        self.row = row


class DataValidationError(DataError):
    def __init__(self, message, row=None, column=None, **context):
        super().__init__(message, row=row, column=column, **context)
        self.row = row
        self.column = column


class DimensionError(DataError):
    pass


class InsufficientHistoryError(DimensionError):
    pass


class ConvergenceError(AnticorError, ArithmeticError):
    code = CODE_NUMERIC

    def __init__(self, message, best=None, objective=None, **context):
        super().__init__(message, **context)
        self.best = best
        self.objective = objective
