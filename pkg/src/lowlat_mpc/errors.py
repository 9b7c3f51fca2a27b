"""Exception hierarchy shared by every layer of the engine."""


class MPCError(Exception):
    """Base class for all engine errors."""


class ConfigurationError(MPCError, ValueError):
    """Invalid session, codec or protocol parameters."""


class EncodingRangeError(MPCError, OverflowError):
    """A real value does not fit the fixed-point range of the ring."""


class ProtocolError(MPCError):
    """A protocol contract was violated (shape mismatch, mask reuse, ...)."""


class ProtocolDesyncError(ProtocolError):
    """Parties entered the same round with different payload layouts."""


class UsageError(MPCError, RuntimeError):
    """API misuse, e.g. reading a reveal ticket before it was flushed."""


class DeadlockError(MPCError, TimeoutError):
    """A party waits on a round the remaining parties never enter."""

    def __init__(self, message, correlation_ids=()):
        super().__init__(message)
        self.correlation_ids = tuple(correlation_ids)
