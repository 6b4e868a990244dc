class QueryError(Exception):
    """Base class for query language errors."""


class QuerySyntaxError(QueryError):
    """Query text does not conform to the grammar."""

    def __init__(self, message: str, column: int):
        super().__init__(f"{message} (column {column})")
        self.column = column


class UnboundVariableError(QueryError):
    """WHERE/RETURN/ORDER BY references a variable not bound in MATCH."""


class UnknownLabelOrEdgeTypeError(QueryError):
    """Node label or edge type is not part of the graph schema."""


class MissingParamError(QueryError):
    """Plan placeholder has no value in the supplied parameters."""


class TypeMismatchError(QueryError):
    """ORDER BY hit a missing or non-comparable property value."""


class UnknownTemplateError(QueryError):
    """No template registered under the requested name."""
