"""Exception taxonomy shared by all modules.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies.
"""


class PipelineError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PipelineError):
    """A run configuration is malformed or internally inconsistent."""


class DataError(PipelineError):
    """Input data violates a documented contract (bad dates, gaps, NAs...)."""


class NumericalError(PipelineError):
    """A numerical routine cannot proceed (rank deficiency, non-SPD matrix...)."""
