"""Exception hierarchy.

Every domain error derives from :class:`SpikeAuctionError` so the CLI can map
it onto a stable exit code (see ``cli.EXIT_CODES``).
"""

from __future__ import annotations


class SpikeAuctionError(Exception):
    """Base class for all domain errors."""


class ValidationError(SpikeAuctionError, ValueError):
    """A value violates one of its type invariants.

    ``invariant`` names the violated rule (e.g. ``"normalization"``).
    """

    def __init__(self, message: str, invariant: str = "") -> None:
        super().__init__(message)
        self.invariant = invariant


class DimensionError(SpikeAuctionError, ValueError):
    pass


class InputError(SpikeAuctionError, ValueError):
    pass


class ConsistencyError(SpikeAuctionError, ValueError):
    pass


class FeasibilityError(ValidationError):
    def __init__(self, message: str) -> None:
        super().__init__(message, invariant="feasibility")


class ConfigError(ValidationError):
    def __init__(self, message: str) -> None:
        super().__init__(message, invariant="ctr-ordering")


class SolverRegimeError(SpikeAuctionError):
    """The requested method does not apply to this instance."""


class MonotonicityError(SolverRegimeError):
    pass


class RegimeError(SolverRegimeError):
    pass


class CapacityExhaustedError(SolverRegimeError):
    pass


class NoThresholdError(SolverRegimeError):
    pass
