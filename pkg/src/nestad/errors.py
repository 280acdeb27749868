"""Exception hierarchy shared by the arithmetic, the oracle and the CLI."""


class NestadError(Exception):
    """Base class. ``location`` is an optional (line, column) in program source."""

    def __init__(self, message: str, location: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.location = location

    def __str__(self) -> str:
        if self.location is None:
            return self.message
        line, col = self.location
        return f"line {line}, column {col}: {self.message}"

    def at(self, location: tuple[int, int] | None) -> "NestadError":
        """Attach a source location unless one is already set."""
        if self.location is None and location is not None:
            self.location = location
        return self


class ZeroPrimal(NestadError, ZeroDivisionError):
    """Inverse or division of an element whose primal (first) component is exactly zero."""


class DomainError(NestadError, ValueError):
    """An analytic function was evaluated outside the set where it is real-analytic."""


class UnknownFunction(NestadError, LookupError):
    """Registry lookup miss."""


class NonFinite(NestadError, ArithmeticError):
    """A finite-difference sample came back NaN or infinite."""


# program-level errors (parse and validation)


class ExprSyntaxError(NestadError):
    pass


class UndefinedFunction(NestadError):
    pass


class UndefinedVariable(NestadError):
    pass


class RecursiveDefinition(NestadError):
    pass


class NestingDepthError(NestadError):
    """D(g) where g itself (transitively) contains a D(...) call."""
