"""Exception hierarchy.

Every error maps onto one CLI exit-code category:
2 parse/precondition, 3 constraint, 4 capacity, 5 internal.
"""

from __future__ import annotations


class QuakeError(ValueError):
    exit_code = 5


class ParseError(QuakeError):
    exit_code = 2

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            location = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{location}: {message}"
        super().__init__(message)


class SchemaParseError(ParseError):
    pass


class FlowParseError(ParseError):
    pass


class PolicySyntaxError(ParseError):
    pass


class PolicySemanticError(ParseError):
    pass


class ConfigError(ParseError):
    pass


class PlanError(ConfigError):
    pass


class StructureError(QuakeError):
    """Input has the wrong shape (arity mismatch), as opposed to being invalid."""

    exit_code = 2


class PreconditionError(QuakeError):
    exit_code = 2


class ConstraintViolationError(QuakeError):
    exit_code = 3


class UnsatisfiableSchemaError(ConstraintViolationError):
    def __init__(self, constraints: list[str]):
        self.constraints = constraints
        named = "; ".join(constraints) if constraints else "<combined constraints>"
        super().__init__(f"No valid context instance exists; unsatisfiable: {named}")


class CapacityError(QuakeError):
    exit_code = 4

    def __init__(self, message: str, cap: int):
        self.cap = cap
        super().__init__(f"{message} (cap={cap})")


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, QuakeError):
        return exc.exit_code
    return 5
