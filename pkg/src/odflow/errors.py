"""Exception hierarchy shared by every odflow module.

Everything user-triggerable derives from :class:`InputError`, which the CLI
maps to exit code 2 and the HTTP service to status 400.  Reported positions
are 1-based data-row numbers (the header is row 0).
"""

from __future__ import annotations


class OdflowError(Exception):
    """Base class for all odflow errors."""


class InputError(OdflowError):
    """Invalid input data or configuration supplied by the caller."""


# --- tabular / geometry ingestion ---------------------------------------

class MissingColumn(InputError):
    def __init__(self, column: str, available: list[str]):
        self.column = column
        self.available = list(available)
        super().__init__(f"column {column!r} not found (available: {', '.join(available)})")


class MalformedCsv(InputError):
    def __init__(self, message: str, row: int | None = None):
        self.row = row
        where = f" (row {row})" if row is not None else ""
        super().__init__(message + where)


class DuplicateNodeId(InputError):
    def __init__(self, node_id: str, row: int | None = None):
        self.node_id = node_id
        self.row = row
        where = f" (row {row})" if row is not None else ""
        super().__init__(f"duplicate node id {node_id!r}{where}")


class CoordinateOutOfRange(InputError):
    def __init__(self, field: str, value: float, row: int):
        self.field = field
        self.value = value
        self.row = row
        super().__init__(f"{field}={value!r} out of range at row {row}")


class NonNumericValue(InputError):
    def __init__(self, field: str, value: str, row: int | None = None):
        self.field = field
        self.value = value
        self.row = row
        where = f" at row {row}" if row is not None else ""
        super().__init__(f"{field}={value!r} is not a plain decimal number{where}")


class NonNegativeViolation(InputError):
    def __init__(self, field: str, value: float, row: int):
        self.field = field
        self.value = value
        self.row = row
        super().__init__(f"{field}={value!r} must be >= 0 (row {row})")


class MalformedGeoJson(InputError):
    pass


class UnsupportedGeometryType(InputError):
    def __init__(self, geometry_type: str, feature_index: int):
        self.geometry_type = geometry_type
        self.feature_index = feature_index
        super().__init__(f"feature {feature_index} has unsupported geometry type {geometry_type!r}")


class AmbiguousKey(InputError):
    def __init__(self, key: str, column: str):
        self.key = key
        self.column = column
        super().__init__(f"key {key!r} occurs more than once in column {column!r}")


class DegenerateGeometry(InputError):
    def __init__(self, feature_id: str):
        self.feature_id = feature_id
        super().__init__(f"feature {feature_id!r} has zero total area")


# --- network assembly -----------------------------------------------------

class UnknownNodeReference(InputError):
    """One or more flows reference node ids absent from the node list."""

    def __init__(self, rows: list[tuple[int, str]]):
        self.rows = list(rows)
        sample = ", ".join(f"row {r}: {nid!r}" for r, nid in rows[:5])
        extra = "" if len(rows) <= 5 else f" (+{len(rows) - 5} more)"
        super().__init__(f"{len(rows)} flow(s) reference unknown nodes: {sample}{extra}")


# --- analytics --------------------------------------------------------------

class NonPositivePopulation(InputError):
    def __init__(self, node_id: str, value: float):
        self.node_id = node_id
        self.value = value
        super().__init__(f"population attribute for node {node_id!r} is {value!r}, must be > 0")


class ZeroDenominator(InputError):
    """The network is degenerate: the null-model denominator vanishes."""


class ZeroDistance(InputError):
    def __init__(self, origin: str, dest: str):
        self.origin = origin
        self.dest = dest
        super().__init__(f"distance between {origin!r} and {dest!r} must be > 0 for the gravity model")


class NoConvergence(OdflowError):
    """Gravity balancing hit the iteration cap; carries the last iterate."""

    def __init__(self, residual: float, iterations: int, expected=None):
        self.residual = residual
        self.iterations = iterations
        self.expected = expected
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")


# --- classification ---------------------------------------------------------

class TooFewDistinctValues(InputError):
    def __init__(self, distinct: int, k: int):
        self.distinct = distinct
        self.k = k
        super().__init__(f"{distinct} distinct value(s) cannot fill {k} classes")


class BreaksOutOfRange(InputError):
    pass


# --- geometry ---------------------------------------------------------------

class PoleSingularity(InputError):
    def __init__(self, lat: float):
        self.lat = lat
        super().__init__(f"mercator is singular at latitude {lat!r}")


# --- scene -------------------------------------------------------------------

class UnresolvedJoin(InputError):
    pass


class EmptyDataset(InputError):
    pass
