"""Exception hierarchy shared by all kmsgraph modules."""


class KmsGraphError(Exception):
    """Base class for every error raised by this package."""


class GraphError(KmsGraphError, ValueError):
    """Malformed graph input (bad endpoint, duplicate edge, bad path word)."""


class ParseError(KmsGraphError, ValueError):
    """Syntax error in a text input, located by 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class PreconditionError(KmsGraphError):
    """An operation was called outside the hypotheses it requires."""


class SinkError(PreconditionError):
    """Graph has a sink; KMS entry points only accept sink-free graphs."""


class NotStronglyConnectedError(PreconditionError):
    """Operation needs a strongly connected graph (irreducible vertex matrix)."""
