"""Exception types shared across the simulator."""


class SimError(Exception):
    """Base class for all simulator errors."""


class PastTimestampError(SimError):
    """An event was scheduled before the current virtual time."""


class UnknownTargetError(SimError):
    """An event was addressed to a device that is not registered."""


class UnknownLinkError(SimError):
    """A frame was sent on a link that does not exist."""


class OversizedBodyError(SimError):
    """An SMS body exceeded the 160-character limit."""


class NmeaError(SimError):
    """Base class for GPS sentence parsing failures."""


class BadChecksumError(NmeaError):
    pass


class MalformedFieldError(NmeaError):
    pass


class UnsupportedSentenceError(NmeaError):
    pass


class OutOfRangeError(SimError):
    """A sensor sample fell outside its valid domain."""


class UnknownApplianceError(SimError):
    pass


class StoreFullError(SimError):
    """The fingerprint store already holds its maximum of 1024 templates."""


class DuplicateTemplateError(SimError):
    pass


class InvalidRoadError(SimError):
    pass


class DuplicatePlateError(SimError):
    pass


class MalformedUidError(SimError):
    pass


class InvalidSlotError(SimError):
    pass


class EmptyMessageError(SimError):
    pass


class UnknownDepartmentError(SimError):
    """No phone number is configured for an emergency department."""


class SchemaMismatchError(SimError):
    """A telemetry row did not match its table's fixed schema."""


class UnknownTableError(SimError):
    pass


class ScenarioParseError(SimError):
    """A scenario line failed to parse; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownQueryPathError(SimError):
    pass


class RejectedActionError(SimError):
    """A gateway client command was not on the whitelist."""
