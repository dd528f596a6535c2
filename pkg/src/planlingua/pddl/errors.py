"""Exception hierarchy for PDDL parsing and execution."""

from __future__ import annotations


class PDDLError(ValueError):
    """Base class for every PDDL diagnostic raised by this package."""


class PDDLSyntaxError(PDDLError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class UndeclaredTypeError(PDDLError):
    def __init__(self, type_name: str, context: str = ""):
        self.type_name = type_name
        suffix = f" in {context}" if context else ""
        super().__init__(f"undeclared type '{type_name}'{suffix}")


class UndeclaredPredicateError(PDDLError):
    def __init__(self, predicate: str, context: str = ""):
        self.predicate = predicate
        suffix = f" in {context}" if context else ""
        super().__init__(f"undeclared predicate '{predicate}'{suffix}")


class ArityError(PDDLError):
    def __init__(self, predicate: str, expected: int, got: int, context: str = ""):
        self.predicate = predicate
        self.expected = expected
        self.got = got
        suffix = f" in {context}" if context else ""
        super().__init__(f"'{predicate}' takes {expected} argument(s), got {got}{suffix}")


class UnknownObjectError(PDDLError):
    def __init__(self, name: str, context: str = ""):
        self.name = name
        suffix = f" in {context}" if context else ""
        super().__init__(f"unknown object '{name}'{suffix}")


class InapplicableActionError(PDDLError):
    def __init__(self, action: str, failed: str):
        self.action = action
        self.failed = failed
        super().__init__(f"{action} is not applicable: {failed} does not hold")
