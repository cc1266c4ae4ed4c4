"""Exception hierarchy shared across the toolkit.

The CLI maps these onto process exit codes: ConfigError -> 2,
DataError -> 3, anything else -> 4.
"""


class StyloprofError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(StyloprofError):
    """Invalid configuration: unknown keys, bad values, inconsistent sections."""


class DataError(StyloprofError):
    """Malformed or missing input data (corpora, tag files, model files)."""
