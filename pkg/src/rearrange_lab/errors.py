"""Exception types shared across the package."""


class RearrangeLabError(Exception):
    """Base class for all package-specific errors."""


class InputError(RearrangeLabError):
    """Malformed input data or invalid configuration (CLI exit code 2)."""


class PreconditionViolated(RearrangeLabError):
    """An operation was called with data violating its stated hypothesis.

    The message names the failed hypothesis (CLI exit code 3).
    """


class NonEqualAtomSpace(PreconditionViolated):
    """A norm kind that requires equal atom weights was evaluated on an
    unequal-weight space."""


class NotZeroMean(PreconditionViolated):
    """Zero-mean input required but the integral is nonzero."""


class EmptyInput(PreconditionViolated):
    """The operation is undefined on the identically-zero function."""


class ExactUnavailable(RearrangeLabError):
    """Exact arithmetic was requested for a quantity that involves an
    inexact root; use a binary-float precision instead."""


class InfeasibleProblem(RearrangeLabError):
    """The search constraint set is empty."""


class TooManyFreeParameters(RearrangeLabError):
    """A landscape was requested with more free parameters than supported."""
