"""Error taxonomy shared across the package.

ConfigError maps to CLI exit code 2, NumericalError to exit code 3.
"""


class ConfigError(ValueError):
    """Invalid configuration, unknown keys, or out-of-range overrides."""


class NumericalError(RuntimeError):
    """Non-convergence, non-finite states, or exhausted iteration caps."""
