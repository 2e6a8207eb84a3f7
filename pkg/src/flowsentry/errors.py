"""Exception types shared across the package."""


class FlowSentryError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(FlowSentryError):
    """Invalid user-supplied configuration (bad dimensions, rates, files)."""


class DataFormatError(FlowSentryError):
    """An artifact file is corrupt, truncated, or of the wrong type."""


class DigestMismatchError(FlowSentryError):
    """Pipeline artifacts do not belong together (content digests differ)."""
