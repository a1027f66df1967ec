"""Typed errors raised across the package.

Every failure mode of file parsing, dataset handling, model persistence and
evaluation maps to one of these classes; nothing else escapes the public API.
"""

from __future__ import annotations


class ShapeQCError(Exception):
    """Base class for all shapeqc errors."""


class ParseError(ShapeQCError):
    """A file does not conform to its format grammar.

    Carries the offending path and, where known, the 1-based line number.
    """

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ""
        if self.path is not None:
            where = f"{self.path}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)


class FaceIndexError(ParseError):
    """A face references a vertex index outside the vertex table."""


class EmptyMeshError(ShapeQCError):
    """Mesh has no faces where at least one is required."""


class DegenerateMeshError(ShapeQCError):
    """Mesh has no face with positive area, so it cannot be sampled."""


class EmptyCloudError(ShapeQCError):
    """Point cloud is empty where at least one point is required."""


class InvalidSpecError(ShapeQCError):
    """A defect or corpus request is inconsistent or cannot be realized."""


class TooFewRowsError(ShapeQCError):
    """Dataset too small to honor the requested split fractions."""


class SchemaMismatchError(ShapeQCError):
    """Serialized model file has an unsupported schema version."""


class LengthMismatchError(ShapeQCError):
    """Two parallel sequences (e.g. rater label lists) differ in length."""


class EmptyEvaluationError(ShapeQCError):
    """A metric was requested over zero items."""
