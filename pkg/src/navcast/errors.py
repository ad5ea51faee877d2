"""Exception hierarchy shared by the whole library."""


class NavcastError(Exception):
    """Base class for every library-raised error."""


class DegenerateInputError(NavcastError):
    """Input is structurally valid but too short / constant / otherwise unusable."""


class ConfigurationError(NavcastError):
    """Caller supplied inconsistent sizes, specs, or options."""


class NumericalError(NavcastError):
    """A computation produced non-finite values or a singular system."""


class AnalysisError(NavcastError):
    """A statistical procedure could not reach a usable conclusion."""


class FitError(NavcastError):
    """Model estimation failed to converge; carries best-so-far parameters."""

    def __init__(self, message, best_params=None):
        super().__init__(message)
        self.best_params = best_params


class IngestionError(NavcastError):
    """Input file missing or malformed; message carries the 1-based line number."""
