"""Exception types shared across the package.

The CLI maps these onto exit codes: InputError -> 2, SizeCapError -> 3,
anything else that escapes -> 1.
"""


class InputError(ValueError):
    """Malformed or mathematically inadmissible input (dimension mismatch,
    non-pointed cone, polytope without the origin in its interior, ...)."""


class SizeCapError(RuntimeError):
    """An enumeration would exceed a configured cap.  Raise instead of
    grinding; the message names the cap and how to override it."""


class NumericalError(RuntimeError):
    """A floating-point routine failed to converge within its iteration
    budget.  Carries diagnostics in the message; exact routines never
    raise this."""


class InternalCheckError(AssertionError):
    """An internal exact cross-check failed (strong duality, certificate
    validation, dimension bookkeeping).  Indicates a bug, not bad input."""
