class GerbeKitError(Exception):
    """Base class for every error raised by the toolkit"""


class StructuralError(GerbeKitError):
    """Input data is malformed: unknown simplex, missing overlap value, bad cover"""


class ParameterError(GerbeKitError):
    """A numerical parameter is out of range"""


class PreconditionError(GerbeKitError):
    """An operation was called on data violating its mathematical precondition"""


class EvaluationError(GerbeKitError):
    """A value could not be evaluated at a requested point"""


class ScenarioError(StructuralError):
    """A scenario file does not parse or does not match the schema"""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}
