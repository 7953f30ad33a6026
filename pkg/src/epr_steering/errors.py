"""Exception hierarchy; each class carries a stable machine-readable code."""


class SteeringError(Exception):
    code = "error"


class InvalidArgument(SteeringError, ValueError):
    code = "invalid-argument"


class UnsupportedBasis(InvalidArgument):
    code = "unsupported-basis"


class ConditioningOnNullEvent(SteeringError, ValueError):
    code = "conditioning-on-null-event"


class VacuousTest(SteeringError, ValueError):
    code = "vacuous-test"


class TruncationTooSmall(InvalidArgument):
    code = "truncation-too-small"
