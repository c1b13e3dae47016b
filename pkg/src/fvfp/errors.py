"""Exception hierarchy shared by all solvers and the CLI exit-code mapping."""


class FVFPError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(FVFPError, ValueError):
    """Bad parameter, malformed config, or violated precondition (CLI exit 2)."""


class ResolutionError(FVFPError):
    """Grid too narrow/coarse for the requested computation (CLI exit 3)."""


class NumericalGuardError(FVFPError):
    """A runtime numerical guard tripped, e.g. the transport CFL check (CLI exit 3)."""


class CoverageError(FVFPError):
    """Requested evaluation exceeds the stored data (checkpoints, support)."""


class StatisticsError(FVFPError):
    """Too few samples for a reliable statistic; carries the observed count."""

    def __init__(self, message, count):
        super().__init__(message)
        self.count = count
