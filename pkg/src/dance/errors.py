"""Exception hierarchy shared across the package."""


class DanceError(Exception):
    """Base class for all package errors."""


class DataError(DanceError):
    """Malformed or inconsistent input data (FASTA, CSV, manifests, images)."""


class ConfigError(DanceError):
    """Invalid parameters or configuration values."""
