"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InputError(ValueError):
    """Supplied data (factorizations, witnesses, permutations) is inconsistent."""


class ParseError(ValueError):
    """A text file or command-line value could not be parsed.

    ``line`` holds the 1-based line number when the error comes from a file.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
