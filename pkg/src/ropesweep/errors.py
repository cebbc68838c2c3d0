"""Exception types shared across the package.

Two families matter for callers: validation errors (bad inputs, broken
preconditions) and numeric failures (a computation that cannot deliver a
meaningful result for otherwise well-formed inputs).  The CLI maps the
first family to exit code 2 and the second to exit code 3.
"""


class RopesweepError(Exception):
    """Base class for all package-specific errors."""


class InvalidKnotError(RopesweepError, ValueError):
    """A polygonal knot violates a structural invariant."""


class InvalidPathError(RopesweepError, ValueError):
    """An isotopy path violates a structural invariant."""


class ValidationError(RopesweepError, ValueError):
    """Generic bad input (parameters, planes, corpus specs, graph nodes)."""


class NumericError(RopesweepError, RuntimeError):
    """A numeric procedure failed to produce a usable result."""


class InfeasibleError(NumericError):
    """No admissible configuration or path exists for the requested level."""


class NonGenericProjectionError(NumericError):
    """A projection direction fails a genericity requirement."""
