"""Exception hierarchy shared by every module.

Each exception carries a short machine-readable ``code`` so the function
registry can map library failures onto ``CallResult`` errors without
string matching.
"""

from __future__ import annotations


class GeoError(Exception):
    """Base class for all library errors."""

    code = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details


class GeoJSONError(GeoError):
    code = "parse_error"


class GeoJSONSyntaxError(GeoJSONError):
    """Malformed JSON text; ``position`` is the character offset."""

    code = "json_syntax"

    def __init__(self, message: str, position: int, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column}, char {position})",
                         position=position, line=line, column=column)
        self.position = position
        self.line = line
        self.column = column


class GeoJSONSchemaError(GeoJSONError):
    code = "schema_error"


class CRSError(GeoError):
    code = "crs_error"


class ProjectionDomainError(CRSError):
    code = "projection_domain"


class GeometryTypeError(GeoError):
    """An operation received a geometry kind it does not accept."""

    code = "geometry_type"


class EmptyInputError(GeoError):
    code = "empty_input"


class FieldError(GeoError):
    """Missing, colliding or wrongly typed attribute field."""

    code = "field_error"


class ParameterError(GeoError):
    code = "invalid_parameter"


class GeographicCRSError(GeoError):
    """A metric operation was asked to work in degrees."""

    code = "geographic_crs"


class FileFormatError(GeoError):
    code = "unsupported_format"


class FetchError(GeoError):
    code = "fetch_error"


class HTTPStatusError(FetchError):
    code = "http_status"

    def __init__(self, status: int, url: str):
        super().__init__(f"GET {url} returned HTTP {status}", status=status, url=url)
        self.status = status


class ResponseTooLarge(FetchError):
    code = "size_exceeded"


class TopologyError(GeoError):
    """No valid output geometry could be built (e.g. no closed face)."""

    code = "topology_error"


class GeoWarning(UserWarning):
    """Non-fatal condition worth surfacing to the planner."""
