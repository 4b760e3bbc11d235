"""Exception hierarchy shared by the engine, the logic and the checker."""


class PetriSMCError(Exception):
    """Base class for all errors raised by this package."""


class InvalidRateError(PetriSMCError, ValueError):
    pass


class InvalidWeightsError(PetriSMCError, ValueError):
    pass


class ModelError(PetriSMCError):
    """A net, observer or parameter set is malformed."""


class NoEnabledRuleError(PetriSMCError):
    pass


class GuardViolationError(PetriSMCError):
    pass


class CorruptEffectError(PetriSMCError):
    """A rule effect produced a marking that breaks a place invariant."""


class ClassificationError(PetriSMCError):
    """Reward classes were not mutually exclusive and exhaustive on a state."""


class UnknownVariableError(PetriSMCError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class KindMismatchError(PetriSMCError, TypeError):
    pass


class OrderingError(PetriSMCError, ValueError):
    pass


class ParseError(PetriSMCError, ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


class QueryError(PetriSMCError, ValueError):
    """Statistical query parameters out of range."""


class ConfigError(PetriSMCError, ValueError):
    """A configuration or experiment file is malformed."""
