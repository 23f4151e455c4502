class RecosyncError(Exception):
    """Base class for all errors raised by recosync."""


class InputError(RecosyncError, ValueError):
    """Malformed model, unknown state/event, or violated precondition."""


class ParseError(InputError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class SearchLimitError(RecosyncError):
    """Exact subset search refused because the automaton is too large."""


class ConfigurationError(RecosyncError):
    pass


class SimulationError(RecosyncError):
    pass


class PhysicalImpossibility(SimulationError):
    """The event is not enabled in some plant that owns it."""


class ControlViolation(SimulationError):
    """A controllable event was disabled by a consulted supervisor."""
