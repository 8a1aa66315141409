"""Exception hierarchy.

Every validation failure derives from :class:`SpecError` (itself a
``ValueError``) so the CLI can map it to exit code 2.
"""


class SpecError(ValueError):
    """Base class for input/validation errors."""


class OutOfRange(SpecError):
    pass


class MalformedSpec(SpecError):
    pass


class NotPeriodic(SpecError):
    pass


class InsufficientData(SpecError):
    pass


class UnknownWitness(SpecError):
    pass


class BadParams(SpecError):
    pass


class SuiteInvalid(SpecError):
    pass


class MissingMetadata(SpecError):
    pass


class UnboundedFunction(SpecError):
    pass


class DegenerateFrequency(SpecError):
    pass


class DomainError(SpecError):
    pass


class NotMonotone(SpecError):
    pass
