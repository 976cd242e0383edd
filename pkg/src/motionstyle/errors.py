"""Shared exception types.

Every subsystem raises one of these instead of bare ValueError/RuntimeError so
callers (CLI, server) can map failures to exit codes and error payloads without
string matching.
"""


class MotionStyleError(Exception):
    """Base class for all package errors."""


class DimensionError(MotionStyleError):
    """Operand shapes are incompatible with the requested operation."""


class NumericError(MotionStyleError):
    """A computation produced NaN/Inf or an otherwise unusable value."""


class StateError(MotionStyleError):
    """An object was used out of order (e.g. backward before forward)."""


class ParseError(MotionStyleError):
    """A file or message could not be parsed."""


class MappingError(MotionStyleError):
    """A joint-map entry refers to a joint that does not exist."""


class ConfigError(MotionStyleError):
    """Invalid configuration value or file."""


class LabelingError(MotionStyleError):
    """Contact/phase labeling failed on a clip."""


class CheckpointError(MotionStyleError):
    """Checkpoint file is malformed or incompatible."""


class EvaluationError(MotionStyleError):
    """An evaluation could not reach a verdict."""
