"""Exception hierarchy shared across the engine."""


class FlowcapError(Exception):
    """Base class for all engine errors."""


class HorizonOverflowError(FlowcapError):
    """A distribution support falls outside the discretized time horizon."""


class DegenerateSpecError(FlowcapError):
    """A distribution spec has an empty or inverted support."""


class NormalizationError(FlowcapError):
    """A probability vector failed the hard normalization check."""


class ConstraintViolationError(FlowcapError):
    """An intent lies outside its feasible interval."""

    def __init__(self, message, flight_id=None, waypoint_index=None):
        super().__init__(message)
        self.flight_id = flight_id
        self.waypoint_index = waypoint_index


class ModelInconsistencyError(FlowcapError):
    """An arrow-of-time or probability-mass invariant was violated upstream."""


class SizeCapError(FlowcapError):
    """The direct congestion PMF path was asked for more flights than its cap."""


class SchemaError(FlowcapError):
    """A scenario file violates the on-disk schema."""
