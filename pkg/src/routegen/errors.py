"""Exception types shared across the package."""

from __future__ import annotations


class RoutegenError(Exception):
    """Base class for every error this package raises deliberately."""


class EmptyFile(RoutegenError):
    """A benchmark file contained no records."""


class MissingField(RoutegenError):
    """A benchmark record lacks a required field."""

    def __init__(self, record_index: int, field: str) -> None:
        super().__init__(f"record {record_index}: missing required field {field!r}")
        self.record_index = record_index
        self.field = field


class DuplicateTaskId(RoutegenError):
    """Two records in one benchmark share a task id."""


class UnknownTaskId(RoutegenError):
    """A label or lookup referenced a task id absent from the benchmark."""


class BackendError(RoutegenError):
    """Base for generation-service failures."""

    retryable = False


class Transport(BackendError):
    """Network-level failure talking to the generation service."""

    retryable = True


class RateLimited(BackendError):
    """The service asked us to back off."""

    retryable = True


class MalformedResponse(BackendError):
    """The service replied with something we cannot use."""


class AuthFailure(BackendError):
    """Credentials rejected; retrying cannot help."""


class ReplayMiss(RoutegenError):
    """The replay store has no recording for this request."""


class DuplicateDecision(RoutegenError):
    """Two routing decisions were supplied for the same task."""


class RunnerUnavailable(RoutegenError):
    """The sandbox runner executable could not be started."""


class ProtocolError(RoutegenError):
    """The sandbox runner violated the one-record-in, one-record-out protocol."""


class DomainError(RoutegenError):
    """Arguments outside the mathematical domain of an estimator or report."""


class ShapeMismatch(RoutegenError):
    """A token transcript does not have the shape its route requires."""


class BenchmarkMismatch(RoutegenError):
    """Reports were asked to combine runs over different benchmarks or k."""


class ConfigError(RoutegenError):
    """A run configuration is invalid; nothing was executed."""
