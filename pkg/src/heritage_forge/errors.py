"""Typed error hierarchy shared by all pipeline stages.

Every error carries a short ``code`` that the compile report uses to
aggregate problems without string-matching messages.
"""

from __future__ import annotations


class HeritageError(Exception):
    """Base class for every error this package raises on purpose."""

    code = "E000"


# --- manifest / marker ingestion ---------------------------------------

class ManifestSyntaxError(HeritageError):
    """Input file is not syntactically valid (carries line/column)."""

    code = "E010"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class SchemaError(HeritageError):
    """A field is missing, ill-typed or out of its allowed range."""

    code = "E011"

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class DanglingReferenceError(HeritageError):
    """An id points at a declaration that does not exist."""

    code = "E012"

    def __init__(self, ref_id, context):
        self.ref_id = ref_id
        super().__init__(f"{context} references unknown id {ref_id!r}")


class DuplicateIdError(HeritageError):
    code = "E013"

    def __init__(self, dup_id, context):
        self.dup_id = dup_id
        super().__init__(f"duplicate id {dup_id!r} in {context}")


class GeoJsonError(HeritageError):
    """Structurally valid JSON that violates FeatureCollection rules."""

    code = "E020"


# --- georeference / pano geometry --------------------------------------

class DomainError(HeritageError):
    """Coordinate outside the Web Mercator domain."""

    code = "E050"


class DegenerateError(HeritageError):
    """Too few or collinear ground control points."""

    code = "E051"


class SingularError(HeritageError):
    """Least-squares system is rank deficient on the geographic side."""

    code = "E052"


class CoincidentError(HeritageError):
    """Bearing is undefined for two identical points."""

    code = "E053"


class GeorefQualityError(HeritageError):
    """GCP fit residuals are too large to trust the overlay placement."""

    code = "E055"


class TooCloseError(HeritageError):
    """Annotation target closer than the 0.5 m conditioning floor."""

    code = "E054"


# --- binary asset probing -----------------------------------------------

class AssetError(HeritageError):
    code = "E030"


class BadMagicError(AssetError):
    code = "E031"


class UnsupportedVersionError(AssetError):
    code = "E032"


class TruncatedFileError(AssetError):
    """Declared and actual byte counts disagree."""

    code = "E033"


class ChunkOrderError(AssetError):
    code = "E034"


class AlignmentError(AssetError):
    code = "E035"


class JsonChunkError(AssetError):
    code = "E036"


class UnknownFormatError(AssetError):
    code = "E037"


class CorruptHeaderError(AssetError):
    code = "E038"


class DecodeError(AssetError):
    code = "E039"


# --- compiler ------------------------------------------------------------

class EmptyInputError(HeritageError):
    code = "E060"
