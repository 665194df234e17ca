"""Exception types shared across the toolkit."""


class DaytopicsError(Exception):
    """Base class for all toolkit errors."""


class ParseError(DaytopicsError):
    """A record in an input file could not be parsed (message names the line)."""


class ValidationError(DaytopicsError):
    """Parsed data violates a documented contract (duplicate ids, bad shapes, ...)."""


class EmbeddingLoadError(DaytopicsError):
    """An embedding file is malformed: bad magic, dim mismatch, truncation, duplicate id."""


class MergeError(DaytopicsError):
    """Cluster merging cannot proceed (no cluster reaches the size threshold)."""


class ConfigError(DaytopicsError):
    """A run configuration file or value is invalid."""


class StageError(DaytopicsError):
    """A pipeline stage failed; message carries the stage name and day."""

    def __init__(self, stage: str, day, message: str):
        self.stage = stage
        self.day = day
        super().__init__(f"stage {stage!r} failed for day {day}: {message}")
