"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes, so every failure mode that can surface
from a subcommand derives from CapsumError.
"""


class CapsumError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------- ingestion

class ParseError(CapsumError):
    """Bundle document is not parseable at all."""


class SchemaError(CapsumError):
    """Bundle document parses but violates the documented schema."""


class EmbeddingFormatError(CapsumError):
    """Base for embedding sidecar file problems."""


class BadMagic(EmbeddingFormatError):
    """File does not start with the EMB1 magic."""


class TruncatedFile(EmbeddingFormatError):
    """Payload shorter than the header-declared n_rows * dim * 4 bytes."""


class ZeroNormRow(EmbeddingFormatError):
    """A matrix row has zero Euclidean norm."""


class InvalidMatrix(EmbeddingFormatError):
    """Matrix fails validation: NaN/Inf entries, bad shape, trailing bytes."""


class ClientError(CapsumError):
    """External model call failed after the configured retries."""


class EmptyCaption(CapsumError):
    """Captioning produced an empty text after prompt stripping."""


class TemplateError(CapsumError):
    """Prompt template misses or leaves unresolved a required placeholder."""


# ------------------------------------------------------------- scoring core

class DimensionMismatch(CapsumError):
    """Embedding dimensions of the two operands disagree."""


class ZeroNormVector(CapsumError):
    """Cosine similarity requested against a zero-norm vector."""


class MissingDiversity(CapsumError):
    """Diversity-adaptive loss requested without a diversity value."""


class NonPositiveSigma(CapsumError):
    """Uncertainty weights must be strictly positive."""


class EmptyScene(CapsumError):
    """A scene covers no frames."""


class TooFewScenes(CapsumError):
    """Diversity needs at least two scenes."""


# ------------------------------------------------------------- segmentation

class InvalidSceneCount(CapsumError):
    """Requested scene count is outside 1..min(n, max_scenes)."""


# ---------------------------------------------------------------- selection

class LengthMismatch(CapsumError):
    """Paired sequences have different lengths."""


class InvalidBudget(CapsumError):
    """budget_ratio outside (0, 1]."""


class InconsistentSelection(CapsumError):
    """Selection does not fit the segmentation it is expanded against."""


# ----------------------------------------------------------------- training

class NonFiniteLoss(CapsumError):
    """Training produced NaN/Inf; carries the trace recorded so far."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class KinkProximity(CapsumError):
    """Gradient check evaluation point too close to a hinge/abs kink."""


# --------------------------------------------------------------- evaluation

class DegenerateInput(CapsumError):
    """Rank correlation of an all-constant sequence is undefined."""


class EmptySelection(CapsumError):
    """Precision undefined for an empty selection."""


class EmptyGroundTruth(CapsumError):
    """Recall undefined for an empty ground-truth set."""


# ---------------------------------------------------------------------- cli

class ConfigError(CapsumError):
    """Pipeline configuration invalid or inconsistent."""
