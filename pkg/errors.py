#!/usr/bin/env python3
"""
Exception hierarchy for argew-embed
"""

from typing import Optional


class EmbeddingError(Exception):
    """Base class for every error raised by this package"""


class GraphError(EmbeddingError):
    """Invalid graph input or node id"""

    def __init__(self, message: str, edge_index: Optional[int] = None):
        super().__init__(message)
        self.edge_index = edge_index


class WalkError(EmbeddingError):
    """Invalid walk parameters or transition request"""


class AugmentError(EmbeddingError):
    """Invalid rescale or augmentation input"""


class TrainingError(EmbeddingError):
    """SGNS training failure"""


class EvaluationError(EmbeddingError):
    """Invalid evaluation input"""


class ConfigError(EmbeddingError):
    """Invalid configuration key or value"""


class FormatError(EmbeddingError):
    """Malformed input file; message carries path and line number"""

    def __init__(
        self, message: str, path: Optional[str] = None, line: Optional[int] = None
    ):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            location = f"line {line}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class StageError(EmbeddingError):
    """Error raised inside a pipeline stage, tagged with the stage name"""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
