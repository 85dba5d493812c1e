"""Exception types shared across the package.

User-facing failures (bad files, bad flags, infeasible configs) derive from
``UserError`` so the CLI can map them to exit code 2; anything else that goes
numerically wrong maps to exit code 1 via ``NumericError``.
"""


class UserError(Exception):
    """Base for errors caused by user input (files, flags, configs)."""


class ConfigError(UserError):
    """Invalid configuration value (dropout rate, fraction, indices...)."""


class DataError(UserError):
    """Invalid or inconsistent dataset content."""


class FileFormatError(UserError):
    """A file on disk does not parse as the declared format."""


class SplitError(UserError):
    """Seen/unseen fold constraints cannot be satisfied."""


class CheckpointError(UserError):
    """Corrupt, truncated or version-mismatched checkpoint file."""


class DimensionError(ValueError):
    """Operand shapes do not line up; message names both shapes."""


class NumericError(ArithmeticError):
    """NaN/Inf encountered where finite values are required."""
