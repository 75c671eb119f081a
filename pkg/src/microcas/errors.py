"""Shared exception types."""


class CasError(Exception):
    """Base class for every kernel-level error."""


class RingMismatchError(CasError):
    """Operands live in different polynomial rings."""


class UnknownVariableError(CasError):
    """A referenced variable is not a generator of the ring at hand."""


class UnsupportedFieldError(CasError):
    """The coefficient field is not admissible for the requested operation."""


class UnsupportedIdealShapeError(CasError):
    """The ideal does not match any of the supported input shapes."""


class DimensionalityError(CasError):
    """A zero-dimensional system was required but not provided."""


class ExprSyntaxError(CasError):
    """Malformed source text.

    Carries the byte offset of the failure and a short hint about what
    was expected at that point.
    """

    def __init__(self, message, offset, expected=None):
        self.offset = offset
        self.expected = expected
        suffix = f" (expected {expected})" if expected else ""
        super().__init__(f"{message} at offset {offset}{suffix}")


class SerializeError(CasError):
    """Value cannot be written in the wire grammar."""


class InternalError(CasError):
    """Invariant violation inside the kernel; indicates a bug."""


class ProtocolError(CasError):
    """Frame stream or response layout violated the protocol."""


class GatewayError(CasError):
    """The gateway refused to allocate a worker."""


class RemoteEvalError(CasError):
    """A worker answered with a nonzero status.

    `status` is the protocol status code (1 evaluation, 2 syntax,
    3 internal) and `message` the worker-provided text.
    """

    def __init__(self, status, message):
        self.status = status
        self.message = message
        super().__init__(f"remote error (status {status}): {message}")


class ConnectionClosedError(CasError):
    """The connection was stopped or dropped and cannot be used."""
