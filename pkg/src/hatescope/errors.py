"""Exception hierarchy shared by all modules."""


class HatescopeError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(HatescopeError, ValueError):
    """An argument is outside its documented domain."""


class DataError(HatescopeError, ValueError):
    """An input file holds a malformed record."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FormatError(DataError):
    """A resource file (embeddings, lexicon) does not follow its format."""


class DatasetError(HatescopeError, ValueError):
    """A dataset violates a training or evaluation precondition."""


class PersistenceError(HatescopeError):
    """A saved model cannot be read back."""
