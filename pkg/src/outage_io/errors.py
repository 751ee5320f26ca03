"""Exception hierarchy.

Every domain failure derives from :class:`OutageIOError`; the CLI maps these to
exit code 1 and anything else to a crash.
"""


class OutageIOError(Exception):
    """Base class for all domain errors raised by outage_io."""


# --- linear algebra / MRIO -------------------------------------------------


class DimensionMismatch(OutageIOError):
    pass


class NegativeEntry(OutageIOError):
    pass


class NotProductive(OutageIOError):
    pass


class SingularSystem(OutageIOError):
    pass


class ZeroOutputWithFlows(OutageIOError):
    pass


class PerturbationExceedsOutput(OutageIOError):
    pass


# --- shocks ------------------------------------------------------------------


class EmptySeries(OutageIOError):
    pass


class NonMonotonicTimestamps(OutageIOError):
    pass


class FractionExceedsUnity(OutageIOError):
    pass


# --- rasters -----------------------------------------------------------------


class MalformedHeader(OutageIOError):
    pass


class RowLengthMismatch(OutageIOError):
    pass


class NonNumericCell(OutageIOError):
    pass


class EmptyIntersection(OutageIOError):
    pass


class NoValidCells(OutageIOError):
    pass


class GridMismatch(OutageIOError):
    pass


class ZeroBaseline(OutageIOError):
    pass


# --- impact models -----------------------------------------------------------


class ShockExceedsDemand(OutageIOError):
    pass


class TargetNotFound(OutageIOError):
    pass


class ZeroTargetDemand(OutageIOError):
    pass


class PartitionMismatch(OutageIOError):
    pass


# --- ingest ------------------------------------------------------------------


class MissingFile(OutageIOError):
    pass


class IndexGap(OutageIOError):
    pass


class ShapeMismatch(OutageIOError):
    pass


class ConsistencyViolation(OutageIOError):
    pass


class AmbiguousMatrixSource(OutageIOError):
    pass


class BadTimestamp(OutageIOError):
    pass


class BadCount(OutageIOError):
    pass


class NegativeCount(OutageIOError):
    pass


class Disorder(NonMonotonicTimestamps):
    """Rows of an outage CSV are not in strictly increasing time order."""


class SchemaViolation(OutageIOError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class MissingParameterization(OutageIOError):
    pass


# --- reporting / CLI ---------------------------------------------------------


class InsufficientCells(OutageIOError):
    pass


class IoFailure(OutageIOError):
    pass


class MethodUnavailable(OutageIOError):
    pass
