"""Error hierarchy for the solver toolkit."""


class GsoError(Exception):
    """Base class for every error raised by the toolkit."""


class GraphParseError(GsoError, ValueError):
    """An edge-list line could not be parsed."""

    def __init__(self, line_number: int, line: str, reason: str):
        self.line_number = line_number
        self.line = line
        super().__init__(f"Line {line_number}: {reason}: '{line}'")


class EmptyGraphError(GsoError, ValueError):
    """The input contained no usable edge."""


class InvalidSizeError(GsoError, ValueError):
    """A problem size is outside the supported range."""


class InvalidNodeError(GsoError, ValueError):
    """A node id does not belong to the graph."""


class InvalidTemperatureError(GsoError, ValueError):
    """A Gumbel-softmax temperature is not strictly positive."""


class InvalidSpecError(GsoError, ValueError):
    """An objective spec does not match the problem or the assignment."""


class ConfigError(GsoError, ValueError):
    """An experiment or solver configuration is inconsistent."""
