"""
SCATTERING LAB ERRORS

Purpose:
- Single exception hierarchy for the numerics, storage and CLI layers
- Every error carries the process exit code the CLI reports for it

Exit codes:
- 0 success
- 1 validation error (model / parameter invariant violated)
- 2 numerical failure or verification FAIL
- 3 parse / IO error
"""

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_PARSE_IO = 3


class ScatteringLabError(Exception):
    """Base class for every error raised by the lab."""
    exit_code = EXIT_NUMERICAL


# ==================================================
# NUMERICAL FAILURES (exit 2)
# ==================================================

class NumericalError(ScatteringLabError):
    """A computation could not be carried out at the requested point."""
    exit_code = EXIT_NUMERICAL


class DomainError(NumericalError):
    """Argument outside the domain of the operation (e.g. real λ for eval)."""
    pass


class ExceptionalPointError(NumericalError):
    """Real λ too close to a pole, box endpoint or branch point of a model."""
    pass


class SingularError(NumericalError):
    """Matrix that has to be inverted is numerically singular."""
    pass


class DimensionError(NumericalError):
    """Matrix or model sizes do not fit together."""
    pass


class QuadratureError(NumericalError):
    """Adaptive integration did not reach the requested tolerance."""
    pass


class VerificationFailure(ScatteringLabError):
    """At least one identity of a verification report exceeded its tolerance."""
    exit_code = EXIT_NUMERICAL


# ==================================================
# VALIDATION (exit 1)
# ==================================================

class ValidationError(ScatteringLabError):
    """Model or parameter violates a structural invariant."""
    exit_code = EXIT_VALIDATION


# ==================================================
# PARSE / IO (exit 3)
# ==================================================

class ParseError(ScatteringLabError):
    """Malformed document or command-line value."""
    exit_code = EXIT_PARSE_IO


class IoError(ScatteringLabError):
    """File could not be read or written."""
    exit_code = EXIT_PARSE_IO
