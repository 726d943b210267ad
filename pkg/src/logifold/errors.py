"""Typed errors shared by all logifold modules.

Every failure mode surfaced to callers has its own class so the CLI and
service can report the originating condition by name.
"""


class LogifoldError(Exception):
    """Base class for all errors raised by this package."""


# --- graph construction / evaluation ---

class DimensionMismatch(LogifoldError):
    pass


class MissingArrow(LogifoldError):
    """An input's sign pattern has no outgoing arrow at some vertex."""


class RegionBudgetExceeded(LogifoldError):
    pass


class NonReLUActivation(LogifoldError):
    pass


# --- ensemble / charts ---

class UnknownLabel(LogifoldError):
    pass


class MissingPrediction(LogifoldError):
    pass


class NoChartCovers(LogifoldError):
    pass


class UnknownChart(LogifoldError):
    pass


class IncompleteCoarseMap(LogifoldError):
    pass


# --- file formats ---

class SchemaError(LogifoldError):
    pass


class RowSumError(LogifoldError):
    pass


class DuplicateInstance(LogifoldError):
    pass


class DimensionChainError(LogifoldError):
    pass


class UnknownActivation(LogifoldError):
    pass


# --- exact interval machinery ---

class OutOfDomain(LogifoldError):
    pass


class KTooSmall(LogifoldError):
    pass


class BudgetExceeded(LogifoldError):
    pass
