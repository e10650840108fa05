"""Exception hierarchy for the toolkit.

Exit-code mapping used by the CLI:
  1 -- usage / configuration errors
  2 -- numerical certification failures (precision, completeness, contours)
  3 -- data validation failures (caches, ingested tables)
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


# -- configuration / usage ---------------------------------------------------

class ConfigError(ToolkitError):
    """Invalid configuration or arguments."""


# -- numerical certification -------------------------------------------------

class NumericalError(ToolkitError):
    """Base for errors where a numerical result could not be certified."""


class PoleError(NumericalError):
    """Evaluation requested at a pole of the function."""


class PrecisionError(NumericalError):
    """Requested accuracy could not be certified after all retries."""


class ContourPoleError(NumericalError):
    """A derivative contour encloses a pole of the integrand."""


class RealityViolationError(NumericalError):
    """Imaginary residue of a provably-real quantity exceeds tolerance."""


class TailBoundError(NumericalError):
    """Series truncation tail exceeds the requested tolerance."""


class OscillationError(NumericalError):
    """Oscillatory integral outside the resolvable parameter range."""


class NoSignChangeError(NumericalError):
    """Root bracket does not bracket a sign change."""


class CompletenessError(NumericalError):
    """Zero count cannot be reconciled with the counting-function estimate."""


class BoundaryZeroError(NumericalError):
    """A zero (near-)on a winding contour; rectangle could not be perturbed away."""


class PhaseStepError(NumericalError):
    """Adaptive phase tracking exceeded its node budget."""


class NewtonDivergenceError(NumericalError):
    """Newton refinement failed to converge inside its isolating rectangle."""


class Theorem1ViolationError(NumericalError):
    """A strong pair classified not-Lehmer: impossible mathematically, so a
    numerical fault somewhere upstream. Aborts the run."""


# -- domain lookups ----------------------------------------------------------

class CentralZeroNotFoundError(ToolkitError):
    """No zeta-prime zero qualifies as the central zero of a pair."""


class CentralZeroMultiplicityError(ToolkitError):
    """More than one zeta-prime zero qualifies as central for one pair."""


class WindowNotCoveredError(ToolkitError):
    """Cached zeros do not cover the window a sum requires."""


class InsufficientDataError(ToolkitError):
    """Too few records for the requested statistic."""


# -- data validation ---------------------------------------------------------

class DataError(ToolkitError):
    """Base for cache / ingestion problems."""


class CacheError(DataError):
    """Cache file missing, corrupt, or checksum mismatch."""


class FormatError(DataError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ValidationError(DataError):
    """Ingested data failed validation (sortedness, residual spot checks)."""
