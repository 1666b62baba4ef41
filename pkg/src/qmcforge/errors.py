"""Exception types shared across the package."""


class QmcforgeError(Exception):
    """Base class for all package errors."""


class UsageError(QmcforgeError, ValueError):
    """Bad arguments, violated preconditions, or unsupported parameter ranges."""


class ResourceLimitError(QmcforgeError, RuntimeError):
    """An enumeration or search would exceed the desk-scale resource caps."""
