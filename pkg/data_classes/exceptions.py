class GooweError(Exception):
    """Base class for every error raised by this package"""


class SchemaError(GooweError, ValueError):
    """An instance, score vector or label does not fit the stream schema"""


class InvalidScoreError(GooweError, ValueError):
    """A raw score is negative or not finite"""


class ConsistencyError(GooweError, RuntimeError):
    """Internal bookkeeping disagrees with itself (missing cache, bad dimensions)"""


class NoComponentsError(GooweError, ValueError):
    """An operation needs at least one ensemble component"""


class EmptyInputError(GooweError, ValueError):
    """A chunk, stream or sample is empty where data is required"""


class StreamParseError(GooweError, ValueError):
    """A stream file could not be parsed"""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DescriptorError(GooweError, ValueError):
    """A run or suite descriptor is invalid"""


class RaggedMatrixError(GooweError, ValueError):
    """A result matrix has missing cells"""
