"""Exception types raised across the package."""


class MmPassiveError(Exception):
    """Base class for every error raised by this package."""


class ParseError(MmPassiveError, ValueError):
    """A network, threshold or schedule document could not be parsed.

    ``location`` names the offending line or field, when known.
    """

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ValidationError(MmPassiveError, ValueError):
    """A structurally parsed object violates model invariants."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems) or "invalid")


class SolverError(MmPassiveError, RuntimeError):
    """The LP solver stalled, cycled or produced an uncertified point."""


class PathOverflowError(MmPassiveError):
    """More source-destination paths exist than the caller allowed."""

    def __init__(self, limit: int):
        self.limit = limit
        super().__init__(
            f"more than {limit} source-destination paths; use the edge-based LP instead"
        )


class FlowConservationError(MmPassiveError, ValueError):
    """A flow assignment does not conserve flow at some relay."""


class ScheduleError(MmPassiveError, ValueError):
    """Activations or schedule parameters are infeasible for the beam model."""
