class EpimemError(Exception):
    """Base class for all errors raised by this package."""


class EmptyDatabase(EpimemError):
    pass


class EmptySequence(EpimemError):
    pass


class InvalidMinsup(EpimemError):
    pass


class InvalidEvent(EpimemError):
    pass


class InvalidSequence(EpimemError):
    pass


class CandidateLimitExceeded(EpimemError):
    """Raised when mining explores more candidates than the configured cap."""

    def __init__(self, explored: int, limit: int):
        super().__init__(f"candidate cap of {limit} exceeded ({explored} explored)")
        self.explored = explored
        self.limit = limit


class NoCandidates(EpimemError):
    pass


class NonMonotonicCycle(EpimemError):
    pass
