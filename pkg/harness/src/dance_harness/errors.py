class HarnessError(Exception):
    """Base class for harness failures."""


class DataError(HarnessError):
    """Input files are missing, malformed, or inconsistent."""


class ConfigError(HarnessError):
    """A parameter is out of its documented range."""
